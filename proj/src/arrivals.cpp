// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/arrivals.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace cloudcap {

std::vector<double> generate_batch_times(const RateFunction& rate, double horizon, Rng& rng)
{
    std::vector<double> times;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& seg : rate.active_intervals(0.0, horizon))
    {
        const double lambda_max = rate.max_on(seg.start, seg.end);
        if (!(lambda_max > 0.0))
            continue;
        std::exponential_distribution<double> gap(lambda_max);
        double t = seg.start;
        for (;;)
        {
            t += gap(rng);
            if (t >= seg.end)
                break;
            if (unif(rng) * lambda_max < rate(t))
                times.push_back(t);
        }
    }
    return times;
}

std::vector<Batch> generate_class_batches(const JobClassSpec& spec,
                                          std::size_t resource_count,
                                          double horizon,
                                          Rng& rng)
{
    std::vector<Batch> batches;
    const auto times = generate_batch_times(spec.rate, horizon, rng);
    batches.reserve(times.size());
    std::uint64_t id = 0;
    for (double t : times)
    {
        Batch b;
        b.batch_id = id++;
        b.class_id = spec.class_id;
        b.arrival_time = t;
        const auto size = spec.batch_size.sample(rng);
        const double service = spec.service.sample(rng);
        b.jobs.reserve(static_cast<std::size_t>(size));
        for (std::int64_t k = 0; k < size; ++k)
        {
            Job j;
            j.class_id = spec.class_id;
            j.arrival_time = t;
            j.service_duration = service;
            j.requirement = ResourceVector(resource_count);
            for (std::size_t n = 0; n < resource_count; ++n)
                j.requirement[n] = spec.requirements[n].sample(rng);
            b.jobs.push_back(std::move(j));
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

std::vector<Batch> generate_workload(const Scenario& scenario, std::uint64_t seed, std::uint64_t replication)
{
    std::vector<Batch> merged;
    for (const auto& spec : scenario.classes)
    {
        auto rng = make_rng(seed, StreamTag::workload, static_cast<std::uint64_t>(spec.class_id), replication);
        auto batches = generate_class_batches(spec, scenario.resources.size(), scenario.horizon_minutes, rng);
        merged.insert(merged.end(), std::make_move_iterator(batches.begin()),
                      std::make_move_iterator(batches.end()));
    }
    std::stable_sort(merged.begin(), merged.end(), [](const Batch& a, const Batch& b) {
        if (a.arrival_time != b.arrival_time)
            return a.arrival_time < b.arrival_time;
        if (a.class_id != b.class_id)
            return a.class_id < b.class_id;
        return a.batch_id < b.batch_id;
    });
    std::uint64_t job_id = 0;
    for (std::size_t k = 0; k < merged.size(); ++k)
    {
        merged[k].batch_id = k;
        for (auto& j : merged[k].jobs)
        {
            j.batch_id = k;
            j.job_id = job_id++;
        }
    }
    return merged;
}

std::vector<Batch> class_slice(const std::vector<Batch>& workload, int class_id)
{
    std::vector<Batch> out;
    for (const auto& b : workload)
        if (b.class_id == class_id)
            out.push_back(b);
    return out;
}

std::size_t job_count(const std::vector<Batch>& workload)
{
    std::size_t n = 0;
    for (const auto& b : workload)
        n += b.jobs.size();
    return n;
}

void write_workload_csv(std::ostream& os, const Scenario& scenario, const std::vector<Batch>& workload)
{
    os << "batch_id,class,arrival_min,jobs,service_min";
    for (const auto& r : scenario.resources)
        os << ",req_" << r;
    os << "\n";
    char buf[64];
    for (const auto& b : workload)
    {
        for (const auto& j : b.jobs)
        {
            os << b.batch_id << ',' << b.class_id << ',';
            std::snprintf(buf, sizeof buf, "%.6f", b.arrival_time);
            os << buf << ',' << b.jobs.size() << ',';
            std::snprintf(buf, sizeof buf, "%.6f", j.service_duration);
            os << buf;
            for (std::size_t n = 0; n < j.requirement.size(); ++n)
                os << ',' << j.requirement[n];
            os << "\n";
        }
    }
}

}  // namespace cloudcap
