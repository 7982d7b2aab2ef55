// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cloudcap/rng.hpp"
#include "cloudcap/scenario.hpp"

namespace cloudcap {

struct Job
{
    std::uint64_t job_id = 0;
    std::uint64_t batch_id = 0;
    int class_id = 0;
    double arrival_time = 0.0;
    double service_duration = 0.0;
    ResourceVector requirement;
};

/// Jobs of one batch share the arrival time and the service duration.
struct Batch
{
    std::uint64_t batch_id = 0;
    int class_id = 0;
    double arrival_time = 0.0;
    std::vector<Job> jobs;
};

/// NHPP batch times on [0, horizon) by thinning. Each active interval of the
/// rate is thinned against its own exact maximum.
std::vector<double> generate_batch_times(const RateFunction& rate, double horizon, Rng& rng);

/// Batches of one class; ids are provisional (generation order).
std::vector<Batch> generate_class_batches(const JobClassSpec& spec,
                                          std::size_t resource_count,
                                          double horizon,
                                          Rng& rng);

/**
 * Full workload for one replication.
 *
 * Each class draws from its own substream of (seed, replication), so the
 * class-i slice does not depend on the other classes. Batches are merged by
 * (time, class, generation order) and renumbered; job ids follow that order.
 */
std::vector<Batch> generate_workload(const Scenario& scenario, std::uint64_t seed, std::uint64_t replication = 0);

/// Batches of a single class from a merged workload.
std::vector<Batch> class_slice(const std::vector<Batch>& workload, int class_id);

std::size_t job_count(const std::vector<Batch>& workload);

/// CSV: batch_id,class,arrival_min,jobs,service_min,req_<resource>... per job.
void write_workload_csv(std::ostream& os, const Scenario& scenario, const std::vector<Batch>& workload);

}  // namespace cloudcap
