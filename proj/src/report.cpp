// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace cloudcap {

std::string fmt(double value)
{
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (std::isnan(value))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    // Avoid "-0.000000".
    if (std::string_view(buf) == "-0.000000")
        return "0.000000";
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

void write_schedule_csv(std::ostream& os, const CapacitySchedule& schedule, const Scenario& scenario)
{
    if (!schedule.has_dedicated())
    {
        os << "minute,resource,policy,total\n";
        for (std::size_t m = 0; m < schedule.minutes(); ++m)
            for (std::size_t n = 0; n < schedule.resources.size(); ++n)
                os << m << ',' << schedule.resources[n] << ',' << schedule.policy << ',' << schedule.total[n][m]
                   << '\n';
        return;
    }
    os << "minute,resource,policy,total,class,dedicated\n";
    for (std::size_t m = 0; m < schedule.minutes(); ++m)
        for (std::size_t n = 0; n < schedule.resources.size(); ++n)
            for (std::size_t i = 0; i < schedule.dedicated.size(); ++i)
                os << m << ',' << schedule.resources[n] << ',' << schedule.policy << ',' << schedule.total[n][m]
                   << ',' << scenario.classes.at(i).class_id << ',' << schedule.dedicated[i][n][m] << '\n';
}

void write_delays_csv(std::ostream& os, const RunMetrics& metrics)
{
    os << "class,arrival_min,delay_min\n";
    for (const auto& c : metrics.classes)
        for (std::size_t k = 0; k < c.delays.size(); ++k)
            os << c.class_id << ',' << fmt(c.delay_arrivals[k]) << ',' << fmt(c.delays[k]) << '\n';
}

void write_occupancy_csv(std::ostream& os, const RunMetrics& metrics)
{
    os << "minute,resource,occupied,target,partition,mean_occupied\n";
    for (const auto& part : metrics.partitions)
        for (std::size_t m = 0; m < metrics.minutes; ++m)
            for (std::size_t n = 0; n < metrics.resources.size(); ++n)
                os << m << ',' << metrics.resources[n] << ',' << part.occupancy_at[n][m] << ','
                   << part.target[n][m] << ',' << part.label << ',' << fmt(part.occupancy_mean[n][m]) << '\n';
}

void write_losses_csv(std::ostream& os, const RunMetrics& metrics)
{
    os << "class,count,arrivals,unserved\n";
    for (const auto& c : metrics.classes)
        os << c.class_id << ',' << c.lost << ',' << c.arrivals << ',' << c.unserved << '\n';
}

void write_trace_csv(std::ostream& os, const RunMetrics& metrics)
{
    os << "t_min,event,job_id,class,detail\n";
    for (const auto& e : metrics.trace)
        os << fmt(e.time) << ',' << e.event << ',' << e.job_id << ',' << e.class_id << ',' << e.detail << '\n';
}

void write_sla_csv(std::ostream& os, const SlaReport& report)
{
    os << "class,name,loss,arrivals,violations,tail,tau_minutes,alpha,status,replications\n";
    for (const auto& c : report.classes)
        os << c.class_id << ',' << c.name << ',' << (c.loss_class ? 1 : 0) << ',' << c.arrivals << ','
           << c.violations << ',' << fmt(c.tail) << ',' << fmt(c.tau_minutes) << ',' << fmt(c.alpha) << ','
           << to_string(c.status) << ',' << report.replications << '\n';
}

void write_survival_csv(std::ostream& os, std::span<const double> grid, std::span<const double> survival)
{
    os << "delay_min,survival\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        os << fmt(grid[k]) << ',' << fmt(survival[k]) << '\n';
}

void write_utilization_csv(std::ostream& os, std::span<const UtilizationRow> rows, std::size_t bin_minutes)
{
    os << "policy";
    if (!rows.empty())
        for (std::size_t b = 0; b < rows.front().bins.size(); ++b)
            os << ",min_" << b * bin_minutes << '_' << (b + 1) * bin_minutes;
    os << '\n';
    for (const auto& row : rows)
    {
        os << row.label;
        for (double v : row.bins)
            os << ',' << fmt(v);
        os << '\n';
    }
}

void write_ks_csv(std::ostream& os, const KsReport& report)
{
    os << "interval_start,arrivals,tested,statistic,p_value,pass\n";
    for (const auto& iv : report.intervals)
        os << fmt(iv.start) << ',' << iv.arrivals << ',' << (iv.tested ? 1 : 0) << ','
           << (iv.tested ? fmt(iv.statistic) : "") << ',' << (iv.tested ? fmt(iv.p_value) : "") << ','
           << (iv.tested ? (iv.pass ? "1" : "0") : "") << '\n';
}

void write_curve_csv(std::ostream& os, std::span<const double> values)
{
    os << "t_min,value\n";
    for (std::size_t m = 0; m < values.size(); ++m)
        os << m << ',' << fmt(values[m]) << '\n';
}

void write_curves_csv(std::ostream& os,
                      std::span<const std::string> names,
                      std::span<const std::vector<double>> curves)
{
    if (names.size() != curves.size())
        throw std::invalid_argument("write_curves_csv: one name per curve");
    os << "t_min";
    for (const auto& name : names)
        os << ',' << name;
    os << '\n';
    const std::size_t len = curves.empty() ? 0 : curves.front().size();
    for (std::size_t m = 0; m < len; ++m)
    {
        os << m;
        for (const auto& c : curves)
            os << ',' << fmt(c.at(m));
        os << '\n';
    }
}

void write_ranks_csv(std::ostream& os, const RankedPathSet& ranked)
{
    os << "rank,path,wins,area,label_midpoint,label_top\n";
    for (std::size_t k = 0; k < ranked.order.size(); ++k)
    {
        const auto p = ranked.order[k];
        os << k + 1 << ',' << p << ',' << ranked.wins[p] << ',' << fmt(ranked.area[p]) << ','
           << fmt(ranked.midpoint_label(k + 1)) << ',' << fmt(ranked.top_label(k + 1)) << '\n';
    }
}

void write_band_csv(std::ostream& os, std::span<const double> reference, const BandCheck& band)
{
    os << "minute,reference,lower,upper,inside\n";
    for (std::size_t m = 0; m < reference.size(); ++m)
        os << m << ',' << fmt(reference[m]) << ',' << fmt(band.lower[m]) << ',' << fmt(band.upper[m]) << ','
           << (band.inside[m] ? 1 : 0) << '\n';
}

void write_translation_csv(std::ostream& os, std::span<const double> reference, std::span<const double> percentile)
{
    os << "minute,reference,percentile\n";
    for (std::size_t m = 0; m < reference.size(); ++m)
        os << m << ',' << fmt(reference[m]) << ',' << fmt(percentile[m]) << '\n';
}

}  // namespace cloudcap
