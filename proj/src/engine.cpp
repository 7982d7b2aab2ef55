// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace cloudcap {

namespace {

bool any_exhausted(const SystemState& state)
{
    for (std::size_t n = 0; n < state.occupied.size(); ++n)
        if (state.occupied[n] >= state.capacity_target[n])
            return true;
    return false;
}

std::string units_text(const ResourceVector& v)
{
    std::ostringstream os;
    for (std::size_t n = 0; n < v.size(); ++n)
        os << (n ? "/" : "") << v[n];
    return os.str();
}

struct Completion
{
    double time;
    std::uint64_t seq;
    const Job* job;

    bool operator>(const Completion& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

class Partition
{
  public:
    Partition(const Scenario& scenario,
              std::vector<const Job*> jobs,
              const std::vector<std::vector<std::int64_t>>& targets,
              std::map<int, ClassMetrics*> metrics,
              std::vector<TraceEvent>* trace)
        : scenario_(scenario),
          jobs_(std::move(jobs)),
          targets_(targets),
          metrics_(std::move(metrics)),
          trace_(trace),
          resources_(scenario.resources.size()),
          minutes_(scenario.minutes()),
          horizon_(scenario.horizon_minutes)
    {
        state_.capacity_target = ResourceVector(resources_, 0);
        state_.occupied = ResourceVector(resources_, 0);
        out_.target.assign(resources_, std::vector<std::int64_t>(minutes_));
        for (std::size_t n = 0; n < resources_; ++n)
            std::copy_n(targets_[n].begin(), minutes_, out_.target[n].begin());
        out_.occupancy_at.assign(resources_, std::vector<std::int64_t>(minutes_, 0));
        out_.occupancy_mean.assign(resources_, std::vector<double>(minutes_, 0.0));
    }

    PartitionMetrics run()
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::size_t next_arrival = 0;
        std::size_t next_minute = 0;
        while (true)
        {
            const double tc = completions_.empty() ? inf : completions_.top().time;
            const double tu = next_minute < minutes_ ? static_cast<double>(next_minute) : inf;
            const double ta = next_arrival < jobs_.size() ? jobs_[next_arrival]->arrival_time : inf;
            const double t = std::min({tc, tu, ta});
            if (!(t < horizon_))
                break;
            advance(t);
            state_.clock = t;

            bool scan = false;
            while (!completions_.empty() && completions_.top().time == t)
            {
                const Job* job = completions_.top().job;
                completions_.pop();
                state_.occupied -= job->requirement;
                log(t, "complete", job->job_id, job->class_id, "");
                scan = true;
            }

            if (tu == t)
            {
                ResourceVector target(resources_);
                for (std::size_t n = 0; n < resources_; ++n)
                {
                    target[n] = targets_[n][next_minute];
                    if (target[n] > state_.capacity_target[n])
                        scan = true;
                }
                state_.capacity_target = target;
                log(t, "capacity", 0, -1, units_text(target));
            }

            if (scan && !state_.queue.empty())
            {
                for (const Job* job : admission_scan(state_))
                    started(job, t);
            }

            if (tu == t)
            {
                for (std::size_t n = 0; n < resources_; ++n)
                    out_.occupancy_at[n][next_minute] = state_.occupied[n];
                ++next_minute;
            }

            while (next_arrival < jobs_.size() && jobs_[next_arrival]->arrival_time == t)
                arrive(jobs_[next_arrival++], t);
        }
        advance(horizon_);

        for (std::size_t m = 0; m < minutes_; ++m)
        {
            const double width = std::min(static_cast<double>(m + 1), horizon_) - static_cast<double>(m);
            for (std::size_t n = 0; n < resources_; ++n)
                out_.occupancy_mean[n][m] = width > 0.0 ? area_(n, m) / width : 0.0;
        }
        for (const auto& q : state_.queue)
            metrics_.at(q.job->class_id)->unserved += 1;
        return std::move(out_);
    }

  private:
    double& area_(std::size_t n, std::size_t m) { return out_.occupancy_mean[n][m]; }

    void advance(double t)
    {
        if (t > last_)
        {
            const auto bin = std::min(static_cast<std::size_t>(last_), minutes_ - 1);
            const double dt = t - last_;
            for (std::size_t n = 0; n < resources_; ++n)
                area_(n, bin) += static_cast<double>(state_.occupied[n]) * dt;
            last_ = t;
        }
    }

    // Occupancy has already been charged.
    void started(const Job* job, double t)
    {
        auto* cm = metrics_.at(job->class_id);
        cm->served += 1;
        cm->delays.push_back(t - job->arrival_time);
        cm->delay_arrivals.push_back(job->arrival_time);
        completions_.push({t + job->service_duration, seq_++, job});
        log(t, "start", job->job_id, job->class_id, units_text(job->requirement));
    }

    void arrive(const Job* job, double t)
    {
        auto* cm = metrics_.at(job->class_id);
        cm->arrivals += 1;
        log(t, "arrival", job->job_id, job->class_id, "");
        // Every queued job was blocked at the last scan and nothing has been
        // freed since, so only the newcomer can fit.
        if (state_.occupied.fits_with(job->requirement, state_.capacity_target))
        {
            state_.occupied += job->requirement;
            started(job, t);
        }
        else if (scenario_.job_class(job->class_id).is_loss_class)
        {
            cm->lost += 1;
            log(t, "lost", job->job_id, job->class_id, "");
        }
        else
        {
            state_.queue.push_back({job});
        }
    }

    void log(double t, const char* event, std::uint64_t job_id, int class_id, std::string detail)
    {
        if (trace_)
            trace_->push_back({t, event, job_id, class_id, std::move(detail)});
    }

    const Scenario& scenario_;
    std::vector<const Job*> jobs_;
    const std::vector<std::vector<std::int64_t>>& targets_;
    std::map<int, ClassMetrics*> metrics_;
    std::vector<TraceEvent>* trace_;
    std::size_t resources_;
    std::size_t minutes_;
    double horizon_;

    SystemState state_;
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>> completions_;
    std::uint64_t seq_ = 0;
    double last_ = 0.0;
    PartitionMetrics out_;
};

void check_targets(const std::vector<std::vector<std::int64_t>>& targets, const Scenario& scenario)
{
    if (targets.size() != scenario.resources.size())
        throw SimulationError("schedule resource count does not match the scenario");
    for (const auto& row : targets)
    {
        if (row.size() < scenario.minutes())
            throw SimulationError("schedule shorter than horizon");
        for (auto v : row)
            if (v < 0)
                throw SimulationError("schedule contains negative capacity");
    }
}

}  // namespace

std::vector<const Job*> admission_scan(SystemState& state)
{
    std::vector<const Job*> admitted;
    if (state.queue.empty() || any_exhausted(state))
        return admitted;
    std::size_t keep = 0;
    std::size_t k = 0;
    for (; k < state.queue.size(); ++k)
    {
        const Job* job = state.queue[k].job;
        if (state.occupied.fits_with(job->requirement, state.capacity_target))
        {
            state.occupied += job->requirement;
            admitted.push_back(job);
            // Requirements are at least 1 per resource.
            if (any_exhausted(state))
            {
                ++k;
                break;
            }
        }
        else
        {
            state.queue[keep++] = state.queue[k];
        }
    }
    for (; k < state.queue.size(); ++k)
        state.queue[keep++] = state.queue[k];
    state.queue.resize(keep);
    return admitted;
}

const ClassMetrics& RunMetrics::job_class(int class_id) const
{
    for (const auto& c : classes)
        if (c.class_id == class_id)
            return c;
    throw std::out_of_range("no metrics for class " + std::to_string(class_id));
}

RunMetrics simulate(const Scenario& scenario,
                    const std::vector<Batch>& workload,
                    const CapacitySchedule& schedule,
                    SimMode mode,
                    const SimOptions& options)
{
    if (!(scenario.horizon_minutes > 0.0))
        throw SimulationError("horizon must be positive");

    RunMetrics out;
    out.mode = mode;
    out.resources = scenario.resources;
    out.minutes = scenario.minutes();
    std::map<int, std::size_t> class_pos;
    for (std::size_t i = 0; i < scenario.classes.size(); ++i)
    {
        out.classes.push_back({});
        out.classes.back().class_id = scenario.classes[i].class_id;
        class_pos[scenario.classes[i].class_id] = i;
    }

    std::vector<std::vector<const Job*>> jobs_by_class(scenario.classes.size());
    std::vector<const Job*> all_jobs;
    double last_time = -std::numeric_limits<double>::infinity();
    for (const auto& batch : workload)
    {
        if (batch.arrival_time < last_time)
            throw SimulationError("workload is not time-ordered");
        last_time = batch.arrival_time;
        for (const auto& job : batch.jobs)
        {
            auto it = class_pos.find(job.class_id);
            if (it == class_pos.end())
                throw SimulationError("workload contains unknown class " + std::to_string(job.class_id));
            if (job.requirement.size() != scenario.resources.size())
                throw SimulationError("job requirement size does not match resources");
            for (std::size_t n = 0; n < job.requirement.size(); ++n)
                if (job.requirement[n] < 1)
                    throw SimulationError("job requirement below 1 unit");
            if (job.arrival_time >= scenario.horizon_minutes)
                continue;
            all_jobs.push_back(&job);
            jobs_by_class[it->second].push_back(&job);
        }
    }

    std::vector<TraceEvent>* trace = options.trace ? &out.trace : nullptr;
    if (mode == SimMode::pooled)
    {
        check_targets(schedule.total, scenario);
        std::map<int, ClassMetrics*> metrics;
        for (auto& c : out.classes)
            metrics[c.class_id] = &c;
        Partition part(scenario, std::move(all_jobs), schedule.total, std::move(metrics), trace);
        auto pm = part.run();
        pm.label = "pooled";
        out.partitions.push_back(std::move(pm));
    }
    else
    {
        if (schedule.dedicated.size() != scenario.classes.size())
            throw SimulationError("dedicated mode needs one capacity partition per class");
        for (std::size_t i = 0; i < scenario.classes.size(); ++i)
        {
            check_targets(schedule.dedicated[i], scenario);
            std::map<int, ClassMetrics*> metrics{{out.classes[i].class_id, &out.classes[i]}};
            Partition part(scenario, std::move(jobs_by_class[i]), schedule.dedicated[i], std::move(metrics), trace);
            auto pm = part.run();
            pm.label = scenario.classes[i].name;
            pm.class_id = scenario.classes[i].class_id;
            out.partitions.push_back(std::move(pm));
        }
    }
    return out;
}

UtilizationSeries utilization_series(const PartitionMetrics& partition, std::size_t resource)
{
    const auto& target = partition.target.at(resource);
    const auto& occ = partition.occupancy_mean.at(resource);
    UtilizationSeries s;
    s.ratio.resize(target.size());
    s.zero_target.resize(target.size());
    for (std::size_t m = 0; m < target.size(); ++m)
    {
        if (target[m] <= 0)
        {
            s.zero_target[m] = true;
            s.ratio[m] = 0.0;
        }
        else
        {
            s.ratio[m] = occ[m] / static_cast<double>(target[m]);
        }
    }
    return s;
}

}  // namespace cloudcap
