// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudcap/arrivals.hpp"
#include "cloudcap/policies.hpp"
#include "cloudcap/scenario.hpp"

namespace cloudcap {

enum class SimMode
{
    /// One shared partition sized by schedule.total.
    pooled,
    /// One partition per class sized by schedule.dedicated.
    dedicated,
};

struct TraceEvent
{
    double time = 0.0;
    std::string event;  // arrival, start, complete, lost, capacity
    std::uint64_t job_id = 0;
    int class_id = -1;
    std::string detail;

    bool operator==(const TraceEvent&) const = default;
};

struct SimOptions
{
    bool trace = false;
};

struct QueuedJob
{
    const Job* job = nullptr;
    bool operator==(const QueuedJob&) const = default;
};

/// Live state of one partition. occupied always equals the summed
/// requirements of in-service jobs.
struct SystemState
{
    double clock = 0.0;
    ResourceVector capacity_target;
    ResourceVector occupied;
    std::vector<QueuedJob> queue;
};

/// Skip-ahead FIFO: walks the queue in order and starts every job that fits
/// in target - occupied. Returns admitted jobs in admission order.
std::vector<const Job*> admission_scan(SystemState& state);

struct ClassMetrics
{
    int class_id = 0;
    std::size_t arrivals = 0;
    /// Jobs that started service (finished or not by the horizon).
    std::size_t served = 0;
    std::size_t lost = 0;
    /// Still waiting at the horizon.
    std::size_t unserved = 0;
    std::vector<double> delays;
    std::vector<double> delay_arrivals;

    bool operator==(const ClassMetrics&) const = default;
};

struct PartitionMetrics
{
    std::string label;
    /// Set for dedicated partitions.
    std::optional<int> class_id;
    std::vector<std::vector<std::int64_t>> target;
    /// Occupancy at each integer minute, after that instant's completions and admissions.
    std::vector<std::vector<std::int64_t>> occupancy_at;
    /// Time-averaged occupancy over [m, m + 1).
    std::vector<std::vector<double>> occupancy_mean;

    bool operator==(const PartitionMetrics&) const = default;
};

struct RunMetrics
{
    SimMode mode = SimMode::pooled;
    std::vector<std::string> resources;
    std::size_t minutes = 0;
    std::vector<ClassMetrics> classes;
    std::vector<PartitionMetrics> partitions;
    std::vector<TraceEvent> trace;

    const ClassMetrics& job_class(int class_id) const;
    bool operator==(const RunMetrics&) const = default;
};

class SimulationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

RunMetrics simulate(const Scenario& scenario,
                    const std::vector<Batch>& workload,
                    const CapacitySchedule& schedule,
                    SimMode mode,
                    const SimOptions& options = {});

struct UtilizationSeries
{
    /// mean occupancy / target per minute; 0 where the target is 0.
    std::vector<double> ratio;
    std::vector<bool> zero_target;
};

UtilizationSeries utilization_series(const PartitionMetrics& partition, std::size_t resource);

}  // namespace cloudcap
