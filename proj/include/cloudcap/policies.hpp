// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudcap/parallel.hpp"
#include "cloudcap/scenario.hpp"
#include "cloudcap/sol.hpp"

namespace cloudcap {

/// Per-minute integer capacity targets. `total[n][m]` for resource n over
/// minute m; the benchmark also keeps `dedicated[i][n][m]` per class index.
struct CapacitySchedule
{
    std::string policy;
    std::vector<std::string> resources;
    std::vector<std::vector<std::int64_t>> total;
    std::vector<std::vector<std::vector<std::int64_t>>> dedicated;

    std::size_t minutes() const { return total.empty() ? 0 : total.front().size(); }
    bool has_dedicated() const { return !dedicated.empty(); }
    ResourceVector at(std::size_t minute) const;
    ResourceVector dedicated_at(std::size_t class_index, std::size_t minute) const;
    std::int64_t unit_minutes(std::size_t resource) const;

    bool operator==(const CapacitySchedule&) const = default;

    /// Effectively infinite capacity; used for offered-load simulation.
    static CapacitySchedule unbounded(std::vector<std::string> resources, std::size_t minutes);
};

/// Same layout before the ceiling is applied.
struct RealSchedule
{
    std::vector<std::vector<double>> total;
    std::vector<std::vector<std::vector<double>>> dedicated;
};

enum class WeightSource
{
    /// omega_i proportional to E[X_i(t)] on the dominant resource.
    mean,
    /// omega_i proportional to one sampled diffusion path per class.
    sampled_path,
};

struct PlannerOptions
{
    LoadMode mode = LoadMode::pointwise;
    WeightSource weights = WeightSource::mean;
    std::uint64_t weight_seed = 0;
    /// initial[i][n] overrides X_in(0); empty keeps the means.
    std::vector<std::vector<double>> initial;
};

/// (load - s) / arrival_rate; nullopt when nothing arrives at t.
std::optional<double> littles_delay_pooled(double aggregate_load, double capacity, double unit_arrival_rate);

class CapacityPlanner
{
  public:
    explicit CapacityPlanner(const Scenario& scenario, PlannerOptions options = {});

    const Scenario& scenario() const { return scenario_; }
    const AggregateSol& aggregate(std::size_t resource) const { return aggregates_[resource]; }
    const SolMoments& moments(std::size_t class_index, std::size_t resource) const
    {
        return moments_[class_index][resource];
    }

    /// nu_i(t) on the dominant resource, clamped at 0.
    double fictitious_dominant_capacity(std::size_t class_index, double t) const;
    /// omega_i(t); equal weights when every weight is zero.
    std::vector<double> weights(double t) const;

    double pooled_value(std::size_t resource, double t) const;
    double benchmark_value(std::size_t class_index, std::size_t resource, double t) const;

    RealSchedule pooled_real(Execution exec = Execution::parallel) const;
    RealSchedule benchmark_real(Execution exec = Execution::parallel) const;

  private:
    double raw_weight(std::size_t class_index, double t) const;

    Scenario scenario_;
    PlannerOptions options_;
    std::size_t dominant_ = 0;
    std::vector<std::vector<SolMoments>> moments_;
    std::vector<AggregateSol> aggregates_;
    std::vector<std::vector<double>> sampled_weights_;
};

double fictitious_dominant_capacity(const Scenario& scenario, std::size_t class_index, double t);

CapacitySchedule pooled_schedule(const Scenario& scenario,
                                 const PlannerOptions& options = {},
                                 Execution exec = Execution::parallel);
CapacitySchedule benchmark_schedule(const Scenario& scenario,
                                    const PlannerOptions& options = {},
                                    Execution exec = Execution::parallel);

/// Ceiling per minute, with tiny floating noise above an integer ignored.
std::int64_t ceil_units(double value);

}  // namespace cloudcap
