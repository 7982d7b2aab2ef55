// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloudcap/engine.hpp"
#include "cloudcap/parallel.hpp"
#include "cloudcap/scenario.hpp"
#include "cloudcap/sol.hpp"

namespace cloudcap {

enum class SlaStatus
{
    pass,
    fail,
    no_data,
};

const char* to_string(SlaStatus status);

struct SlaClassResult
{
    int class_id = 0;
    std::string name;
    bool loss_class = false;
    std::size_t arrivals = 0;
    /// Delayed beyond tau (including never served), or lost for the loss class.
    std::size_t violations = 0;
    /// violations / arrivals.
    double tail = 0.0;
    double tau_minutes = 0.0;
    double alpha = 0.0;
    SlaStatus status = SlaStatus::no_data;
};

struct SlaReport
{
    std::vector<SlaClassResult> classes;
    double lost_fraction = 0.0;
    std::size_t replications = 0;

    bool all_pass() const;
    const SlaClassResult& job_class(int class_id) const;
};

/// Pools all replications (a multiset union) and checks every class.
SlaReport sla_check(std::span<const RunMetrics> runs, const Scenario& scenario);

/// P(D > d) on grid; jobs never served count as infinite delay.
std::vector<double> delay_survival(std::span<const RunMetrics> runs, int class_id, std::span<const double> grid);

struct UtilizationRow
{
    std::string label;
    /// Mean utilization per bin in percent.
    std::vector<double> bins;
};

/// One row per partition, averaged over replications.
std::vector<UtilizationRow> utilization_table(std::span<const RunMetrics> runs,
                                              std::size_t resource,
                                              std::size_t bin_minutes = 120);

struct RankedPathSet
{
    std::size_t paths = 0;
    /// order[k] is the path index at rank k + 1 (rank 1 is the top path).
    std::vector<std::size_t> order;
    /// rank[p] is the 1-based rank of path p.
    std::vector<std::size_t> rank;
    std::vector<std::size_t> wins;
    std::vector<double> area;

    /// 100 (P - k + 0.5) / P for rank k.
    double midpoint_label(std::size_t k) const;
    /// 100 (P - k) / P, the top of 200 paths is 99.5.
    double top_label(std::size_t k) const;
};

/// Path a outranks b when a > b in more bins than b > a. Ordered by wins,
/// then area, then index.
RankedPathSet rank_paths(const PathMatrix& paths, Execution exec = Execution::parallel);

/// Per-minute empirical percentile of the reference within the ensemble, in
/// [0, 100], linearly interpolated between order statistics.
std::vector<double> percentile_translation(std::span<const double> reference, const PathMatrix& paths);

struct BandCheck
{
    std::size_t upper_rank = 0;
    std::size_t lower_rank = 0;
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<bool> inside;
    /// Share of minutes >= warmup where the reference lies inside the band.
    double fraction_inside = 0.0;
};

/// Band between ranked paths round(0.1 P) and round(0.9 P).
BandCheck band_containment(std::span<const double> reference,
                           const PathMatrix& paths,
                           const RankedPathSet& ranked,
                           std::size_t warmup_minutes,
                           double upper_share = 0.1,
                           double lower_share = 0.9);

struct KsInterval
{
    double start = 0.0;
    std::size_t arrivals = 0;
    bool tested = false;
    double statistic = 0.0;
    double p_value = 1.0;
    bool pass = false;
};

struct KsReport
{
    double interval_length = 0.0;
    std::vector<KsInterval> intervals;
    std::size_t tested = 0;
    std::size_t passed = 0;
    std::size_t skipped = 0;

    std::optional<double> pass_rate() const;
};

/// Exact P(D_n < d) for the one-sample KS statistic.
double kolmogorov_cdf(std::size_t n, double d);

/// KS statistic of samples against Exp(1).
double ks_statistic_exp1(std::vector<double> samples);

/// Splits [0, horizon) into intervals, applies the logarithmic transform to
/// each interval with at least n_min arrivals and tests against Exp(1).
KsReport nhpp_ks_test(std::span<const double> arrival_times,
                      double interval_length,
                      double horizon,
                      std::size_t n_min = 5,
                      double level = 0.05);

}  // namespace cloudcap
