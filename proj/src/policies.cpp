// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cloudcap/normal.hpp"

namespace cloudcap {

ResourceVector CapacitySchedule::at(std::size_t minute) const
{
    ResourceVector v(total.size());
    for (std::size_t n = 0; n < total.size(); ++n)
        v[n] = total[n].at(minute);
    return v;
}

ResourceVector CapacitySchedule::dedicated_at(std::size_t class_index, std::size_t minute) const
{
    const auto& per_class = dedicated.at(class_index);
    ResourceVector v(per_class.size());
    for (std::size_t n = 0; n < per_class.size(); ++n)
        v[n] = per_class[n].at(minute);
    return v;
}

std::int64_t CapacitySchedule::unit_minutes(std::size_t resource) const
{
    std::int64_t acc = 0;
    for (auto v : total.at(resource))
        acc += v;
    return acc;
}

CapacitySchedule CapacitySchedule::unbounded(std::vector<std::string> resources, std::size_t minutes)
{
    CapacitySchedule s;
    s.policy = "unbounded";
    s.total.assign(resources.size(), std::vector<std::int64_t>(minutes, std::int64_t{1} << 60));
    s.resources = std::move(resources);
    return s;
}

std::optional<double> littles_delay_pooled(double aggregate_load, double capacity, double unit_arrival_rate)
{
    if (!(unit_arrival_rate > 0.0))
        return std::nullopt;
    return (aggregate_load - capacity) / unit_arrival_rate;
}

std::int64_t ceil_units(double value)
{
    if (!(value > 0.0))
        return 0;
    const double slack = 1e-9 * std::max(1.0, value);
    return static_cast<std::int64_t>(std::ceil(value - slack));
}

CapacityPlanner::CapacityPlanner(const Scenario& scenario, PlannerOptions options)
    : scenario_(checked(scenario)), options_(std::move(options)), dominant_(scenario_.dominant_index())
{
    const std::size_t classes = scenario_.classes.size();
    const std::size_t resources = scenario_.resources.size();
    if (!options_.initial.empty())
    {
        if (options_.initial.size() != classes)
            throw std::invalid_argument("initial occupancy needs one row per class");
        for (const auto& row : options_.initial)
            if (row.size() != resources)
                throw std::invalid_argument("initial occupancy needs one value per resource");
    }

    moments_.resize(classes);
    for (std::size_t i = 0; i < classes; ++i)
        for (std::size_t n = 0; n < resources; ++n)
            moments_[i].push_back(sol_moments(scenario_.classes[i], n, options_.mode));

    for (std::size_t n = 0; n < resources; ++n)
    {
        std::vector<SolMoments> parts;
        std::vector<double> init;
        for (std::size_t i = 0; i < classes; ++i)
        {
            parts.push_back(moments_[i][n]);
            if (!options_.initial.empty())
                init.push_back(options_.initial[i][n]);
        }
        aggregates_.emplace_back(std::move(parts), std::move(init));
    }

    if (options_.weights == WeightSource::sampled_path)
    {
        const auto grid = minute_grid(scenario_.minutes());
        for (std::size_t i = 0; i < classes; ++i)
        {
            auto rng = make_rng(options_.weight_seed, StreamTag::weights, i, 0);
            const auto& m = moments_[i][dominant_];
            const double x0 = options_.initial.empty() ? m.mean(0.0) : options_.initial[i][dominant_];
            auto path = diffusion_path(m, x0, rng, grid);
            for (auto& v : path)
                v = std::max(v, 0.0);
            sampled_weights_.push_back(std::move(path));
        }
    }
}

double CapacityPlanner::fictitious_dominant_capacity(std::size_t class_index, double t) const
{
    const auto& spec = scenario_.classes.at(class_index);
    const auto& agg = aggregates_[dominant_];
    const double value = agg.percentile(spec.sla.gamma(), t) - spec.sla.tau_minutes * agg.unit_arrival_rate(t);
    return std::max(value, 0.0);
}

double CapacityPlanner::raw_weight(std::size_t class_index, double t) const
{
    if (options_.weights == WeightSource::sampled_path)
    {
        const auto& path = sampled_weights_[class_index];
        if (t <= 0.0)
            return path.front();
        const auto lo = static_cast<std::size_t>(t);
        if (lo + 1 >= path.size())
            return path.back();
        const double f = t - static_cast<double>(lo);
        return path[lo] + f * (path[lo + 1] - path[lo]);
    }
    const auto& agg = aggregates_[dominant_];
    const auto& m = moments_[class_index][dominant_];
    return std::max(agg.initial(class_index) - m.mean(0.0) + m.mean(t), 0.0);
}

std::vector<double> CapacityPlanner::weights(double t) const
{
    const std::size_t classes = scenario_.classes.size();
    std::vector<double> w(classes);
    double sum = 0.0;
    for (std::size_t i = 0; i < classes; ++i)
    {
        w[i] = raw_weight(i, t);
        sum += w[i];
    }
    if (!(sum > 0.0))
    {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(classes));
        return w;
    }
    for (auto& v : w)
        v /= sum;
    return w;
}

double CapacityPlanner::pooled_value(std::size_t resource, double t) const
{
    if (resource != dominant_)
        return std::max(aggregates_[resource].percentile(1.0 - scenario_.epsilon, t), 0.0);
    const auto w = weights(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * fictitious_dominant_capacity(i, t);
    return acc;
}

double CapacityPlanner::benchmark_value(std::size_t class_index, std::size_t resource, double t) const
{
    const auto& spec = scenario_.classes.at(class_index);
    const auto& m = moments_[class_index][resource];
    const double x0 = aggregates_[resource].initial(class_index);
    if (resource != dominant_)
        return std::max(percentile_path(m, x0, 1.0 - scenario_.epsilon, t), 0.0);
    const double value = percentile_path(m, x0, spec.sla.gamma(), t) - spec.sla.tau_minutes * m.unit_arrival_rate(t);
    return std::max(value, 0.0);
}

namespace {

template <class Fn>
void for_each_minute(std::size_t minutes, Execution exec, Fn&& fn)
{
    if (exec == Execution::serial)
    {
        for (std::size_t m = 0; m < minutes; ++m)
            fn(m);
        return;
    }
    const auto count = static_cast<long long>(minutes);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long m = 0; m < count; ++m)
        fn(static_cast<std::size_t>(m));
}

}  // namespace

RealSchedule CapacityPlanner::pooled_real(Execution exec) const
{
    const std::size_t minutes = scenario_.minutes();
    const std::size_t resources = scenario_.resources.size();
    RealSchedule out;
    out.total.assign(resources, std::vector<double>(minutes));
    for_each_minute(minutes, exec, [&](std::size_t m) {
        for (std::size_t n = 0; n < resources; ++n)
            out.total[n][m] = pooled_value(n, static_cast<double>(m));
    });
    return out;
}

RealSchedule CapacityPlanner::benchmark_real(Execution exec) const
{
    const std::size_t minutes = scenario_.minutes();
    const std::size_t resources = scenario_.resources.size();
    const std::size_t classes = scenario_.classes.size();
    RealSchedule out;
    out.total.assign(resources, std::vector<double>(minutes, 0.0));
    out.dedicated.assign(classes, std::vector<std::vector<double>>(resources, std::vector<double>(minutes)));
    for_each_minute(minutes, exec, [&](std::size_t m) {
        for (std::size_t n = 0; n < resources; ++n)
        {
            double sum = 0.0;
            for (std::size_t i = 0; i < classes; ++i)
            {
                const double v = benchmark_value(i, n, static_cast<double>(m));
                out.dedicated[i][n][m] = v;
                sum += v;
            }
            out.total[n][m] = sum;
        }
    });
    return out;
}

double fictitious_dominant_capacity(const Scenario& scenario, std::size_t class_index, double t)
{
    return CapacityPlanner(scenario).fictitious_dominant_capacity(class_index, t);
}

CapacitySchedule pooled_schedule(const Scenario& scenario, const PlannerOptions& options, Execution exec)
{
    const CapacityPlanner planner(scenario, options);
    const auto real = planner.pooled_real(exec);
    CapacitySchedule s;
    s.policy = "pooled";
    s.resources = scenario.resources;
    for (const auto& row : real.total)
    {
        auto& out = s.total.emplace_back(row.size());
        std::transform(row.begin(), row.end(), out.begin(), ceil_units);
    }
    return s;
}

CapacitySchedule benchmark_schedule(const Scenario& scenario, const PlannerOptions& options, Execution exec)
{
    const CapacityPlanner planner(scenario, options);
    const auto real = planner.benchmark_real(exec);
    const std::size_t minutes = scenario.minutes();
    const std::size_t resources = scenario.resources.size();
    CapacitySchedule s;
    s.policy = "benchmark";
    s.resources = scenario.resources;
    s.total.assign(resources, std::vector<std::int64_t>(minutes, 0));
    for (const auto& per_class : real.dedicated)
    {
        auto& ded = s.dedicated.emplace_back();
        for (std::size_t n = 0; n < resources; ++n)
        {
            auto& row = ded.emplace_back(minutes);
            for (std::size_t m = 0; m < minutes; ++m)
            {
                row[m] = ceil_units(per_class[n][m]);
                s.total[n][m] += row[m];
            }
        }
    }
    return s;
}

}  // namespace cloudcap
