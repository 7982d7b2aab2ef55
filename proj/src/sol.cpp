// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/sol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <omp.h>

#include "cloudcap/normal.hpp"

namespace cloudcap {

int configured_threads()
{
    if (const char* env = std::getenv("CLOUDCAP_THREADS"))
    {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return omp_get_max_threads();
}

void apply_thread_limit() { omp_set_num_threads(configured_threads()); }

OfferedLoad::OfferedLoad(RateFunction rate, ServiceDistribution service, LoadMode mode)
    : rate_(std::move(rate)), service_(std::move(service)), mode_(mode), atoms_(service_.atoms())
{
    if (!std::isfinite(service_.mean()))
        throw std::invalid_argument("offered load needs a finite service mean");
}

double OfferedLoad::operator()(double t) const
{
    return mode_ == LoadMode::pointwise ? pointwise(t) : exact(t);
}

double OfferedLoad::pointwise(double t) const { return rate_(t) * service_.mean(); }

double OfferedLoad::exact(double t) const
{
    if (t <= 0.0)
        return 0.0;
    if (!atoms_.empty())
    {
        double acc = 0.0;
        for (double s : atoms_)
            acc += rate_.integral(t - s, t);
        return acc / static_cast<double>(atoms_.size());
    }

    // m(t) = int_0^upper lambda(t - x) P(S > x) dx
    double upper = t;
    if (service_.truncation())
        upper = std::min(upper, *service_.truncation());

    // Split where lambda(t - x) has kinks or jumps.
    std::vector<double> cuts{0.0, upper};
    for (const auto& seg : rate_.active_intervals(0.0, t))
    {
        for (double edge : {seg.start, seg.end})
        {
            const double x = t - edge;
            if (x > 0.0 && x < upper)
                cuts.push_back(x);
        }
    }
    if (rate_.period())
    {
        for (double k = std::floor(t / *rate_.period()); k >= 0.0; k -= 1.0)
        {
            const double x = t - k * *rate_.period();
            if (x <= 0.0)
                continue;
            if (x >= upper)
                break;
            cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double x) { return rate_(t - x) * service_.survival(x); };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    {
        if (!(cuts[k] < cuts[k + 1]))
            continue;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[k], cuts[k + 1],
                                                                              15, 1e-10);
    }
    return total;
}

double offered_load_mean(const RateFunction& rate, const ServiceDistribution& service, double t, LoadMode mode)
{
    return OfferedLoad(rate, service, mode)(t);
}

SolMoments sol_moments(const JobClassSpec& spec, std::size_t resource, LoadMode mode)
{
    if (resource >= spec.requirements.size())
        throw std::invalid_argument("sol_moments: resource index out of range");
    SolMoments m;
    m.class_id = spec.class_id;
    m.resource = resource;
    m.batch_mean = spec.batch_size.mean();
    m.batch_variance = spec.batch_size.variance();
    m.req_mean = spec.requirements[resource].mean();
    m.req_variance = spec.requirements[resource].variance();
    m.load = OfferedLoad(spec.rate, spec.service, mode);
    return m;
}

double percentile_path(const SolMoments& moments, double x0, double gamma, double t)
{
    const double spread = std::sqrt(std::max(t, 0.0) * moments.variance(t));
    return x0 - moments.mean(0.0) + moments.mean(t) + spread * inverse_normal_cdf(gamma);
}

PathTable tabulate_path(const SolMoments& moments, double x0, std::span<const double> grid)
{
    PathTable table;
    table.base.resize(grid.size());
    table.scale.resize(grid.size());
    const double shift = x0 - moments.mean(0.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        if (k > 0 && !(grid[k] > grid[k - 1]))
            throw std::invalid_argument("diffusion_path: grid must be strictly increasing");
        const double load = moments.load(grid[k]);
        table.base[k] = shift + moments.mean_for_load(load);
        table.scale[k] = std::sqrt(moments.variance_for_load(load));
    }
    return table;
}

void add_diffusion_path(const PathTable& table, Rng& rng, std::span<const double> grid, std::span<double> out)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    double w = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        const double dt = grid[k] - prev;
        if (dt > 0.0)
            w += std::sqrt(dt) * normal(rng);
        prev = grid[k];
        out[k] += table.base[k] + table.scale[k] * w;
    }
}

std::vector<double> diffusion_path(const SolMoments& moments, double x0, Rng& rng, std::span<const double> grid)
{
    std::vector<double> out(grid.size(), 0.0);
    add_diffusion_path(tabulate_path(moments, x0, grid), rng, grid, out);
    return out;
}

double interpolate(std::span<const double> grid, std::span<const double> values, double t)
{
    if (grid.empty() || grid.size() != values.size())
        throw std::invalid_argument("interpolate: grid/value size mismatch");
    if (t <= grid.front())
        return values.front();
    if (t >= grid.back())
        return values.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    const auto lo = hi - 1;
    const double f = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + f * (values[hi] - values[lo]);
}

AggregateSol::AggregateSol(std::vector<SolMoments> parts, std::vector<double> initial)
    : parts_(std::move(parts)), initial_(std::move(initial))
{
    if (parts_.empty())
        throw std::invalid_argument("aggregate_moments: no classes");
    resource_ = parts_.front().resource;
    for (const auto& p : parts_)
        if (p.resource != resource_)
            throw std::invalid_argument("aggregate_moments: mixed resources");
    if (initial_.empty())
    {
        for (const auto& p : parts_)
            initial_.push_back(p.mean(0.0));
    }
    else if (initial_.size() != parts_.size())
    {
        throw std::invalid_argument("aggregate_moments: one initial occupancy per class");
    }
}

double AggregateSol::mean(double t) const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < parts_.size(); ++k)
        acc += initial_[k] - parts_[k].mean(0.0) + parts_[k].mean(t);
    return acc;
}

double AggregateSol::variance(double t) const
{
    double acc = 0.0;
    for (const auto& p : parts_)
        acc += std::max(t, 0.0) * p.variance(t);
    return acc;
}

double AggregateSol::percentile(double gamma, double t) const
{
    return mean(t) + std::sqrt(variance(t)) * inverse_normal_cdf(gamma);
}

double AggregateSol::unit_arrival_rate(double t) const
{
    double acc = 0.0;
    for (const auto& p : parts_)
        acc += p.unit_arrival_rate(t);
    return acc;
}

std::vector<PathTable> AggregateSol::tabulate(std::span<const double> grid) const
{
    std::vector<PathTable> tables;
    for (std::size_t k = 0; k < parts_.size(); ++k)
        tables.push_back(tabulate_path(parts_[k], initial_[k], grid));
    return tables;
}

std::vector<double> AggregateSol::sample_path(Rng& rng, std::span<const double> grid) const
{
    std::vector<double> total(grid.size(), 0.0);
    for (const auto& table : tabulate(grid))
        add_diffusion_path(table, rng, grid, total);
    return total;
}

AggregateSol aggregate_moments(std::vector<SolMoments> parts, std::vector<double> initial)
{
    return AggregateSol(std::move(parts), std::move(initial));
}

PathMatrix diffusion_ensemble(const AggregateSol& sol,
                              std::size_t paths,
                              std::span<const double> grid,
                              std::uint64_t seed,
                              Execution exec)
{
    PathMatrix out(paths, grid.size());
    const auto tables = sol.tabulate(grid);
    auto fill = [&](std::size_t p) {
        auto rng = make_rng(seed, StreamTag::diffusion, 0, p);
        for (const auto& table : tables)
            add_diffusion_path(table, rng, grid, out.row(p));
    };
    if (exec == Execution::serial)
    {
        for (std::size_t p = 0; p < paths; ++p)
            fill(p);
    }
    else
    {
        const auto n = static_cast<long long>(paths);
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < n; ++p)
            fill(static_cast<std::size_t>(p));
    }
    return out;
}

std::vector<double> minute_grid(std::size_t minutes)
{
    std::vector<double> g(minutes);
    for (std::size_t m = 0; m < minutes; ++m)
        g[m] = static_cast<double>(m);
    return g;
}

}  // namespace cloudcap
