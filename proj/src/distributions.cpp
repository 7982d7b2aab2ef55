// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cloudcap {

DiscretePmf::DiscretePmf(std::vector<std::int64_t> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs))
{
    if (values_.empty() || values_.size() != probs_.size())
        throw std::invalid_argument("pmf needs matching, non-empty values and probabilities");
    for (double p : probs_)
    {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("pmf probabilities must be finite and non-negative");
    }
    const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("pmf probabilities sum to zero");

    // Already-normalized input is kept bit-for-bit so text round trips are exact.
    const bool renormalize = std::abs(total - 1.0) > 1e-12;
    cdf_.resize(probs_.size());
    double acc = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k)
    {
        if (renormalize)
            probs_[k] /= total;
        acc += probs_[k];
        cdf_[k] = acc;
        const auto x = static_cast<double>(values_[k]);
        m1 += probs_[k] * x;
        m2 += probs_[k] * x * x;
    }
    cdf_.back() = 1.0;
    mean_ = m1;
    variance_ = std::max(m2 - m1 * m1, 0.0);
}

DiscretePmf DiscretePmf::degenerate(std::int64_t value)
{
    return DiscretePmf({value}, {1.0});
}

DiscretePmf DiscretePmf::geometric_with_mean(double mean)
{
    if (!(mean >= 1.0) || !std::isfinite(mean))
        throw std::invalid_argument("geometric batch mean must be >= 1");
    if (mean == 1.0)
        return degenerate(1);
    const double p = 1.0 / mean;
    std::vector<std::int64_t> values;
    std::vector<double> probs;
    double tail = 1.0;
    for (std::int64_t k = 1; tail > 1e-12; ++k)
    {
        const double pk = p * std::pow(1.0 - p, static_cast<double>(k - 1));
        values.push_back(k);
        probs.push_back(pk);
        tail -= pk;
    }
    return DiscretePmf(std::move(values), std::move(probs));
}

std::int64_t DiscretePmf::sample(Rng& rng) const
{
    if (values_.size() == 1)
        return values_.front();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        --it;
    return values_[static_cast<std::size_t>(it - cdf_.begin())];
}

double DiscretePmf::stddev() const { return std::sqrt(variance_); }

std::int64_t DiscretePmf::min_value() const
{
    return *std::min_element(values_.begin(), values_.end());
}

std::int64_t DiscretePmf::max_value() const
{
    return *std::max_element(values_.begin(), values_.end());
}

double LognormalService::sigma() const
{
    const double cv = stddev / mean;
    return std::sqrt(std::log1p(cv * cv));
}

double LognormalService::mu() const
{
    const double s = sigma();
    return std::log(mean) - 0.5 * s * s;
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};

}  // namespace

ServiceDistribution::ServiceDistribution(Kind kind, std::optional<double> truncate_minutes)
    : kind_(std::move(kind)), truncate_(truncate_minutes)
{
    std::visit(overloaded{
                   [](const ExponentialService& e) {
                       if (!(e.mean > 0.0) || !std::isfinite(e.mean))
                           throw std::invalid_argument("exponential service mean must be positive");
                   },
                   [](const LognormalService& l) {
                       if (!(l.mean > 0.0) || !(l.stddev > 0.0) || !std::isfinite(l.mean)
                           || !std::isfinite(l.stddev))
                           throw std::invalid_argument("lognormal service needs positive mean and stddev");
                   },
                   [](const EmpiricalService& e) {
                       if (e.samples.empty())
                           throw std::invalid_argument("empirical service needs samples");
                       for (double s : e.samples)
                           if (!(s > 0.0) || !std::isfinite(s))
                               throw std::invalid_argument("empirical service samples must be positive");
                   },
               },
               kind_);
    if (truncate_ && !(*truncate_ > 0.0))
        throw std::invalid_argument("service truncation must be positive");
    mean_ = compute_mean();
}

double ServiceDistribution::untruncated_sample(Rng& rng) const
{
    return std::visit(overloaded{
                          [&](const ExponentialService& e) {
                              std::exponential_distribution<double> d(1.0 / e.mean);
                              return d(rng);
                          },
                          [&](const LognormalService& l) {
                              std::lognormal_distribution<double> d(l.mu(), l.sigma());
                              return d(rng);
                          },
                          [&](const EmpiricalService& e) {
                              std::uniform_int_distribution<std::size_t> d(0, e.samples.size() - 1);
                              return e.samples[d(rng)];
                          },
                      },
                      kind_);
}

double ServiceDistribution::sample(Rng& rng) const
{
    double s = untruncated_sample(rng);
    // A zero draw is possible only through floating underflow.
    s = std::max(s, 1e-9);
    if (truncate_)
        s = std::min(s, *truncate_);
    return s;
}

double ServiceDistribution::compute_mean() const
{
    return std::visit(
        overloaded{
            [&](const ExponentialService& e) {
                if (!truncate_)
                    return e.mean;
                return e.mean * (1.0 - std::exp(-*truncate_ / e.mean));
            },
            [&](const LognormalService& l) {
                if (!truncate_)
                    return l.mean;
                const double c = *truncate_;
                const double mu = l.mu();
                const double s = l.sigma();
                const double z = (std::log(c) - mu) / s;
                return l.mean * std_normal_cdf(z - s) + c * (1.0 - std_normal_cdf(z));
            },
            [&](const EmpiricalService& e) {
                double acc = 0.0;
                for (double x : e.samples)
                    acc += truncate_ ? std::min(x, *truncate_) : x;
                return acc / static_cast<double>(e.samples.size());
            },
        },
        kind_);
}

double ServiceDistribution::survival(double x) const
{
    if (x < 0.0)
        return 1.0;
    if (truncate_ && x >= *truncate_)
        return 0.0;
    return std::visit(overloaded{
                          [&](const ExponentialService& e) { return std::exp(-x / e.mean); },
                          [&](const LognormalService& l) {
                              if (x <= 0.0)
                                  return 1.0;
                              return 1.0 - std_normal_cdf((std::log(x) - l.mu()) / l.sigma());
                          },
                          [&](const EmpiricalService& e) {
                              const auto n = std::count_if(e.samples.begin(), e.samples.end(),
                                                           [x](double s) { return s > x; });
                              return static_cast<double>(n) / static_cast<double>(e.samples.size());
                          },
                      },
                      kind_);
}

std::string ServiceDistribution::kind_name() const
{
    return std::visit(overloaded{
                          [](const ExponentialService&) { return std::string("exponential"); },
                          [](const LognormalService&) { return std::string("lognormal"); },
                          [](const EmpiricalService&) { return std::string("empirical"); },
                      },
                      kind_);
}

std::vector<double> ServiceDistribution::atoms() const
{
    const auto* e = std::get_if<EmpiricalService>(&kind_);
    if (!e)
        return {};
    std::vector<double> out = e->samples;
    if (truncate_)
        for (auto& x : out)
            x = std::min(x, *truncate_);
    return out;
}

}  // namespace cloudcap
