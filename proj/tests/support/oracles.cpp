// SPDX-License-Identifier: Apache-2.0
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

double normal_quantile(double p)
{
    double lo = -40.0;
    double hi = 40.0;
    for (int k = 0; k < 200; ++k)
    {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
        if (hi - lo < 1e-15)
            break;
    }
    return 0.5 * (lo + hi);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int k = 1; k < n; ++k)
        acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

Moments moments(const std::vector<double>& xs)
{
    Moments m;
    if (xs.empty())
        return m;
    for (double x : xs)
        m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs)
        m.variance += (x - m.mean) * (x - m.mean);
    if (xs.size() > 1)
        m.variance /= static_cast<double>(xs.size() - 1);
    return m;
}

namespace {

std::int64_t draw(const std::vector<std::int64_t>& values, const std::vector<double>& probs, double u)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        acc += probs[k];
        if (u < acc)
            return values[k];
    }
    return values.back();
}

}  // namespace

Moments compound_sum(double m,
                     const std::vector<std::int64_t>& batch_values,
                     const std::vector<double>& batch_probs,
                     const std::vector<std::int64_t>& req_values,
                     const std::vector<double>& req_probs,
                     std::size_t draws,
                     std::uint64_t seed)
{
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::poisson_distribution<long> poisson(m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double bt = 0.0;
    double rt = 0.0;
    for (double p : batch_probs)
        bt += p;
    for (double p : req_probs)
        rt += p;
    std::vector<double> sums(draws);
    for (auto& s : sums)
    {
        const long n = poisson(rng);
        std::int64_t total = 0;
        for (long b = 0; b < n; ++b)
        {
            const auto v = draw(batch_values, batch_probs, unif(rng) * bt);
            for (std::int64_t j = 0; j < v; ++j)
                total += draw(req_values, req_probs, unif(rng) * rt);
        }
        s = static_cast<double>(total);
    }
    return moments(sums);
}

QueueTrace multi_server_queue(const std::vector<QueueJob>& jobs,
                              const std::vector<std::int64_t>& servers,
                              double horizon)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    struct Busy
    {
        std::uint64_t job;
        double done;
        std::uint64_t order;
    };
    QueueTrace out;
    std::vector<Busy> busy;
    std::vector<std::size_t> waiting;
    std::vector<bool> arrived(jobs.size(), false);
    std::int64_t capacity = 0;
    std::uint64_t order = 0;
    std::size_t minute = 0;

    while (true)
    {
        double t = minute < servers.size() ? static_cast<double>(minute) : inf;
        for (const auto& b : busy)
            t = std::min(t, b.done);
        for (std::size_t k = 0; k < jobs.size(); ++k)
            if (!arrived[k])
                t = std::min(t, jobs[k].arrival);
        if (!(t < horizon))
            break;

        std::vector<Busy> finished;
        for (const auto& b : busy)
            if (b.done == t)
                finished.push_back(b);
        std::sort(finished.begin(), finished.end(), [](const Busy& x, const Busy& y) { return x.order < y.order; });
        for (const auto& f : finished)
            out.events.push_back({t, "complete", f.job});
        std::erase_if(busy, [t](const Busy& b) { return b.done == t; });

        const bool tick = minute < servers.size() && static_cast<double>(minute) == t;
        if (tick)
            capacity = servers[minute];

        while (!waiting.empty() && static_cast<std::int64_t>(busy.size()) < capacity)
        {
            const auto& j = jobs[waiting.front()];
            busy.push_back({j.id, t + j.service, order++});
            out.events.push_back({t, "start", j.id});
            waiting.erase(waiting.begin());
        }

        if (tick)
        {
            out.queue_length.push_back(waiting.size());
            ++minute;
        }

        for (std::size_t k = 0; k < jobs.size(); ++k)
        {
            if (arrived[k] || jobs[k].arrival != t)
                continue;
            arrived[k] = true;
            out.events.push_back({t, "arrival", jobs[k].id});
            if (waiting.empty() && static_cast<std::int64_t>(busy.size()) < capacity)
            {
                busy.push_back({jobs[k].id, t + jobs[k].service, order++});
                out.events.push_back({t, "start", jobs[k].id});
            }
            else
            {
                waiting.push_back(k);
            }
        }
    }
    return out;
}

cloudcap::Scenario single_resource_scenario(double rate, double service_mean, double horizon)
{
    using namespace cloudcap;
    Scenario sc;
    sc.name = "micro";
    sc.resources = {"cpu"};
    sc.dominant = 0;
    sc.horizon_minutes = horizon;

    JobClassSpec vm;
    vm.class_id = 0;
    vm.name = "vm";
    vm.is_loss_class = true;
    vm.rate = RateFunction::constant(0.0);
    vm.batch_size = DiscretePmf::degenerate(1);
    vm.service = ServiceDistribution(ExponentialService{service_mean});
    vm.requirements = {DiscretePmf::degenerate(1)};
    vm.sla = {0.0, 0.01};

    JobClassSpec c = vm;
    c.class_id = 1;
    c.name = "queued";
    c.is_loss_class = false;
    c.rate = RateFunction::constant(rate);
    c.sla = {10.0, 0.2};

    sc.classes = {vm, c};
    return sc;
}

}  // namespace oracle
