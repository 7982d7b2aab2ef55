// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cloudcap {

const char* to_string(SlaStatus status)
{
    switch (status)
    {
    case SlaStatus::pass:
        return "pass";
    case SlaStatus::fail:
        return "fail";
    case SlaStatus::no_data:
        return "no_data";
    }
    return "unknown";
}

bool SlaReport::all_pass() const
{
    return std::all_of(classes.begin(), classes.end(),
                       [](const SlaClassResult& c) { return c.status != SlaStatus::fail; });
}

const SlaClassResult& SlaReport::job_class(int class_id) const
{
    for (const auto& c : classes)
        if (c.class_id == class_id)
            return c;
    throw std::out_of_range("no SLA result for class " + std::to_string(class_id));
}

SlaReport sla_check(std::span<const RunMetrics> runs, const Scenario& scenario)
{
    if (runs.empty())
        throw std::invalid_argument("sla_check needs at least one replication");
    SlaReport report;
    report.replications = runs.size();
    std::size_t loss_arrivals = 0;
    std::size_t loss_lost = 0;
    for (const auto& spec : scenario.classes)
    {
        SlaClassResult r;
        r.class_id = spec.class_id;
        r.name = spec.name;
        r.loss_class = spec.is_loss_class;
        r.tau_minutes = spec.sla.tau_minutes;
        r.alpha = spec.sla.alpha;
        for (const auto& run : runs)
        {
            const auto& cm = run.job_class(spec.class_id);
            r.arrivals += cm.arrivals;
            if (spec.is_loss_class)
            {
                r.violations += cm.lost;
            }
            else
            {
                r.violations += cm.unserved;
                for (double d : cm.delays)
                    if (d > spec.sla.tau_minutes)
                        ++r.violations;
            }
        }
        if (r.arrivals == 0)
        {
            r.status = SlaStatus::no_data;
        }
        else
        {
            r.tail = static_cast<double>(r.violations) / static_cast<double>(r.arrivals);
            r.status = r.tail <= r.alpha ? SlaStatus::pass : SlaStatus::fail;
        }
        if (spec.is_loss_class)
        {
            loss_arrivals += r.arrivals;
            loss_lost += r.violations;
        }
        report.classes.push_back(r);
    }
    if (loss_arrivals > 0)
        report.lost_fraction = static_cast<double>(loss_lost) / static_cast<double>(loss_arrivals);
    return report;
}

std::vector<double> delay_survival(std::span<const RunMetrics> runs, int class_id, std::span<const double> grid)
{
    std::vector<double> delays;
    std::size_t unserved = 0;
    for (const auto& run : runs)
    {
        const auto& cm = run.job_class(class_id);
        delays.insert(delays.end(), cm.delays.begin(), cm.delays.end());
        unserved += cm.unserved;
    }
    const std::size_t total = delays.size() + unserved;
    if (total == 0)
        throw std::invalid_argument("delay_survival: no delay samples");
    std::sort(delays.begin(), delays.end());
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        const auto above = delays.end() - std::upper_bound(delays.begin(), delays.end(), grid[k]);
        out[k] = static_cast<double>(static_cast<std::size_t>(above) + unserved) / static_cast<double>(total);
    }
    return out;
}

std::vector<UtilizationRow> utilization_table(std::span<const RunMetrics> runs,
                                              std::size_t resource,
                                              std::size_t bin_minutes)
{
    if (runs.empty())
        return {};
    if (bin_minutes == 0)
        throw std::invalid_argument("utilization bin must be positive");
    const std::size_t minutes = runs.front().minutes;
    const std::size_t nbins = (minutes + bin_minutes - 1) / bin_minutes;
    std::vector<UtilizationRow> rows;
    for (const auto& part : runs.front().partitions)
        rows.push_back({part.label, std::vector<double>(nbins, 0.0)});

    for (const auto& run : runs)
    {
        if (run.partitions.size() != rows.size() || run.minutes != minutes)
            throw std::invalid_argument("utilization_table: runs have different layouts");
        for (std::size_t p = 0; p < rows.size(); ++p)
        {
            const auto series = utilization_series(run.partitions[p], resource);
            for (std::size_t b = 0; b < nbins; ++b)
            {
                const std::size_t lo = b * bin_minutes;
                const std::size_t hi = std::min(lo + bin_minutes, minutes);
                double acc = 0.0;
                for (std::size_t m = lo; m < hi; ++m)
                    acc += series.ratio[m];
                rows[p].bins[b] += 100.0 * acc / static_cast<double>(hi - lo);
            }
        }
    }
    for (auto& row : rows)
        for (auto& v : row.bins)
            v /= static_cast<double>(runs.size());
    return rows;
}

double RankedPathSet::midpoint_label(std::size_t k) const
{
    const auto p = static_cast<double>(paths);
    return 100.0 * (p - static_cast<double>(k) + 0.5) / p;
}

double RankedPathSet::top_label(std::size_t k) const
{
    const auto p = static_cast<double>(paths);
    return 100.0 * (p - static_cast<double>(k)) / p;
}

namespace {

// +1 when a outranks b, -1 when b outranks a, 0 on a draw.
int compare_paths(std::span<const double> a, std::span<const double> b)
{
    std::size_t above = 0;
    std::size_t below = 0;
    for (std::size_t m = 0; m < a.size(); ++m)
    {
        above += a[m] > b[m];
        below += a[m] < b[m];
    }
    return above > below ? 1 : (above < below ? -1 : 0);
}

}  // namespace

RankedPathSet rank_paths(const PathMatrix& paths, Execution exec)
{
    const std::size_t P = paths.paths();
    if (P < 2)
        throw std::invalid_argument("rank_paths needs at least two paths");
    RankedPathSet out;
    out.paths = P;
    out.wins.assign(P, 0);
    out.area.assign(P, 0.0);
    for (std::size_t p = 0; p < P; ++p)
    {
        const auto row = paths.row(p);
        out.area[p] = std::accumulate(row.begin(), row.end(), 0.0);
    }

    if (exec == Execution::serial)
    {
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = a + 1; b < P; ++b)
            {
                const int c = compare_paths(paths.row(a), paths.row(b));
                if (c > 0)
                    ++out.wins[a];
                else if (c < 0)
                    ++out.wins[b];
            }
    }
    else
    {
        const auto n = static_cast<long long>(P);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long a = 0; a < n; ++a)
        {
            std::size_t w = 0;
            for (long long b = 0; b < n; ++b)
                if (b != a && compare_paths(paths.row(static_cast<std::size_t>(a)),
                                            paths.row(static_cast<std::size_t>(b)))
                                  > 0)
                    ++w;
            out.wins[static_cast<std::size_t>(a)] = w;
        }
    }

    out.order.resize(P);
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::sort(out.order.begin(), out.order.end(), [&](std::size_t x, std::size_t y) {
        if (out.wins[x] != out.wins[y])
            return out.wins[x] > out.wins[y];
        if (out.area[x] != out.area[y])
            return out.area[x] > out.area[y];
        return x < y;
    });
    out.rank.resize(P);
    for (std::size_t k = 0; k < P; ++k)
        out.rank[out.order[k]] = k + 1;
    return out;
}

std::vector<double> percentile_translation(std::span<const double> reference, const PathMatrix& paths)
{
    if (reference.size() != paths.bins())
        throw std::invalid_argument("percentile_translation: grid mismatch");
    const std::size_t P = paths.paths();
    if (P < 2)
        throw std::invalid_argument("percentile_translation needs at least two paths");
    std::vector<double> out(reference.size());
    std::vector<double> column(P);
    for (std::size_t m = 0; m < reference.size(); ++m)
    {
        for (std::size_t p = 0; p < P; ++p)
            column[p] = paths(p, m);
        std::sort(column.begin(), column.end());
        const double ref = reference[m];
        if (ref >= column.back())
        {
            out[m] = 100.0;
            continue;
        }
        if (ref <= column.front())
        {
            out[m] = 0.0;
            continue;
        }
        const auto hi = static_cast<std::size_t>(std::upper_bound(column.begin(), column.end(), ref) - column.begin());
        const std::size_t lo = hi - 1;
        const double pos = static_cast<double>(lo) + (ref - column[lo]) / (column[hi] - column[lo]);
        out[m] = 100.0 * pos / static_cast<double>(P - 1);
    }
    return out;
}

BandCheck band_containment(std::span<const double> reference,
                           const PathMatrix& paths,
                           const RankedPathSet& ranked,
                           std::size_t warmup_minutes,
                           double upper_share,
                           double lower_share)
{
    if (reference.size() != paths.bins())
        throw std::invalid_argument("band_containment: grid mismatch");
    const std::size_t P = paths.paths();
    auto pick = [P](double share) {
        const auto k = static_cast<long long>(std::llround(share * static_cast<double>(P)));
        return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(P)));
    };
    BandCheck out;
    out.upper_rank = pick(upper_share);
    out.lower_rank = pick(lower_share);
    const auto up = paths.row(ranked.order[out.upper_rank - 1]);
    const auto lo = paths.row(ranked.order[out.lower_rank - 1]);
    out.upper.resize(reference.size());
    out.lower.resize(reference.size());
    out.inside.resize(reference.size());
    std::size_t counted = 0;
    std::size_t inside = 0;
    for (std::size_t m = 0; m < reference.size(); ++m)
    {
        out.upper[m] = std::max(up[m], lo[m]);
        out.lower[m] = std::min(up[m], lo[m]);
        out.inside[m] = reference[m] >= out.lower[m] && reference[m] <= out.upper[m];
        if (m >= warmup_minutes)
        {
            ++counted;
            inside += out.inside[m];
        }
    }
    out.fraction_inside = counted ? static_cast<double>(inside) / static_cast<double>(counted) : 0.0;
    return out;
}

}  // namespace cloudcap
