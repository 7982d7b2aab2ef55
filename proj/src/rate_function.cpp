// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace cloudcap {
namespace poly {

double evaluate(const std::vector<double>& coeffs, double x)
{
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

std::vector<double> derivative(const std::vector<double>& coeffs)
{
    if (coeffs.size() <= 1)
        return {};
    std::vector<double> out(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        out[k - 1] = coeffs[k] * static_cast<double>(k);
    return out;
}

std::vector<double> antiderivative(const std::vector<double>& coeffs)
{
    std::vector<double> out(coeffs.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out[k + 1] = coeffs[k] / static_cast<double>(k + 1);
    return out;
}

namespace {

std::size_t degree(const std::vector<double>& coeffs)
{
    std::size_t d = coeffs.size();
    while (d > 0 && coeffs[d - 1] == 0.0)
        --d;
    return d == 0 ? 0 : d - 1;
}

bool all_zero(const std::vector<double>& coeffs)
{
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

double bracketed_root(const std::vector<double>& coeffs, double lo, double hi)
{
    auto f = [&](double x) { return evaluate(coeffs, x); };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t max_iter = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
    return 0.5 * (a + b);
}

}  // namespace

std::vector<double> sign_changes(const std::vector<double>& coeffs, double a, double b)
{
    std::vector<double> roots;
    if (!(a < b) || all_zero(coeffs))
        return roots;
    const std::size_t deg = degree(coeffs);
    if (deg == 0)
        return roots;

    std::vector<double> cuts{a};
    auto crit = critical_points(coeffs, a, b);
    cuts.insert(cuts.end(), crit.begin(), crit.end());
    cuts.push_back(b);

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        const double flo = evaluate(coeffs, lo);
        const double fhi = evaluate(coeffs, hi);
        if ((flo < 0.0 && fhi > 0.0) || (flo > 0.0 && fhi < 0.0))
            roots.push_back(bracketed_root(coeffs, lo, hi));
    }
    return roots;
}

std::vector<double> critical_points(const std::vector<double>& coeffs, double a, double b)
{
    return sign_changes(derivative(coeffs), a, b);
}

}  // namespace poly

RateFunction::RateFunction(std::vector<double> coeffs,
                           std::optional<Interval> window,
                           std::optional<double> period)
    : coeffs_(std::move(coeffs)), window_(window), period_(period)
{
    if (period_ && !(*period_ > 0.0))
        throw std::invalid_argument("rate period must be positive");
    if (window_ && !(window_->start < window_->end))
        throw std::invalid_argument("rate window must satisfy start < end");
    antiderivative_ = poly::antiderivative(coeffs_);
    if (period_)
        period_segments_ = local_active(0.0, *period_);
}

RateFunction RateFunction::constant(double rate)
{
    return RateFunction(std::vector<double>{rate});
}

double RateFunction::polynomial(double local_t) const
{
    return poly::evaluate(coeffs_, local_t);
}

double RateFunction::operator()(double t) const
{
    if (t < 0.0)
        return 0.0;
    double local = t;
    if (period_)
        local = std::fmod(t, *period_);
    if (window_ && (local < window_->start || local >= window_->end))
        return 0.0;
    return std::max(polynomial(local), 0.0);
}

std::vector<Interval> RateFunction::local_active(double lo, double hi) const
{
    std::vector<Interval> out;
    if (window_)
    {
        lo = std::max(lo, window_->start);
        hi = std::min(hi, window_->end);
    }
    if (!(lo < hi))
        return out;

    std::vector<double> cuts{lo};
    auto roots = poly::sign_changes(coeffs_, lo, hi);
    cuts.insert(cuts.end(), roots.begin(), roots.end());
    cuts.push_back(hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        if (!(a < b) || polynomial(0.5 * (a + b)) <= 0.0)
            continue;
        if (!out.empty() && out.back().end == a)
            out.back().end = b;
        else
            out.push_back({a, b});
    }
    return out;
}

double RateFunction::local_integral(double a, double b) const
{
    return poly::evaluate(antiderivative_, b) - poly::evaluate(antiderivative_, a);
}

namespace {

// Calls fn(local_lo, local_hi, offset) for each piece of [t0, t1] mapped into
// local time.
template<class Fn>
void for_each_local_range(const std::optional<double>& period, double t0, double t1, Fn&& fn)
{
    if (!period)
    {
        fn(t0, t1, 0.0);
        return;
    }
    const double p = *period;
    auto block = static_cast<long long>(std::floor(t0 / p));
    for (;; ++block)
    {
        const double offset = static_cast<double>(block) * p;
        if (offset >= t1)
            break;
        const double lo = std::max(t0 - offset, 0.0);
        const double hi = std::min(t1 - offset, p);
        if (lo < hi)
            fn(lo, hi, offset);
    }
}

}  // namespace

double RateFunction::integral(double t0, double t1) const
{
    t0 = std::max(t0, 0.0);
    if (!(t0 < t1))
        return 0.0;
    double total = 0.0;
    for_each_local_range(period_, t0, t1, [&](double lo, double hi, double) {
        auto segments = period_ ? period_segments_ : local_active(lo, hi);
        for (const auto& seg : segments)
        {
            const double a = std::max(seg.start, lo);
            const double b = std::min(seg.end, hi);
            if (a < b)
                total += local_integral(a, b);
        }
    });
    return total;
}

std::vector<Interval> RateFunction::active_intervals(double t0, double t1) const
{
    t0 = std::max(t0, 0.0);
    std::vector<Interval> out;
    if (!(t0 < t1))
        return out;
    for_each_local_range(period_, t0, t1, [&](double lo, double hi, double offset) {
        auto segments = period_ ? period_segments_ : local_active(lo, hi);
        for (const auto& seg : segments)
        {
            const double a = std::max(seg.start, lo) + offset;
            const double b = std::min(seg.end, hi) + offset;
            if (!(a < b))
                continue;
            if (!out.empty() && out.back().end == a)
                out.back().end = b;
            else
                out.push_back({a, b});
        }
    });
    return out;
}

double RateFunction::max_on(double t0, double t1) const
{
    t0 = std::max(t0, 0.0);
    if (!(t0 <= t1))
        return 0.0;
    double best = 0.0;
    auto consider = [&](double local) { best = std::max(best, polynomial(local)); };
    for_each_local_range(period_, t0, std::max(t1, t0 + 1e-12), [&](double lo, double hi, double) {
        if (window_)
        {
            lo = std::max(lo, window_->start);
            hi = std::min(hi, window_->end);
        }
        if (!(lo < hi))
            return;
        consider(lo);
        consider(hi);
        for (double c : poly::critical_points(coeffs_, lo, hi))
            consider(c);
    });
    return best;
}

RateFunction RateFunction::scaled(double factor) const
{
    std::vector<double> c = coeffs_;
    for (auto& x : c)
        x *= factor;
    return RateFunction(std::move(c), window_, period_);
}

bool RateFunction::is_zero() const
{
    if (std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; }))
        return true;
    if (period_)
        return period_segments_.empty();
    return false;
}

}  // namespace cloudcap
