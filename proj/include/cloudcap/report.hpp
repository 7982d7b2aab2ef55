// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cloudcap/analysis.hpp"
#include "cloudcap/engine.hpp"
#include "cloudcap/policies.hpp"

namespace cloudcap {

/// Fixed six-decimal rendering so reruns are byte-identical.
std::string fmt(double value);

void write_schedule_csv(std::ostream& os, const CapacitySchedule& schedule, const Scenario& scenario);
void write_delays_csv(std::ostream& os, const RunMetrics& metrics);
void write_occupancy_csv(std::ostream& os, const RunMetrics& metrics);
void write_losses_csv(std::ostream& os, const RunMetrics& metrics);
void write_trace_csv(std::ostream& os, const RunMetrics& metrics);

void write_sla_csv(std::ostream& os, const SlaReport& report);
void write_survival_csv(std::ostream& os, std::span<const double> grid, std::span<const double> survival);
void write_utilization_csv(std::ostream& os, std::span<const UtilizationRow> rows, std::size_t bin_minutes);
void write_ks_csv(std::ostream& os, const KsReport& report);

/// t_min,value
void write_curve_csv(std::ostream& os, std::span<const double> values);
/// t_min,<name>... with one column per curve.
void write_curves_csv(std::ostream& os,
                      std::span<const std::string> names,
                      std::span<const std::vector<double>> curves);
void write_ranks_csv(std::ostream& os, const RankedPathSet& ranked);
void write_band_csv(std::ostream& os, std::span<const double> reference, const BandCheck& band);
void write_translation_csv(std::ostream& os, std::span<const double> reference, std::span<const double> percentile);

/// Opens path for writing or throws std::runtime_error.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace cloudcap
