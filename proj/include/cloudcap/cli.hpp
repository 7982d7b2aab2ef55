// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cloudcap/scenario.hpp"
#include "cloudcap/sol.hpp"

namespace cloudcap {

struct RunManifest
{
    std::string command;
    std::string preset;
    std::filesystem::path scenario_file;
    std::size_t seeds = 1;
    double scale = 1.0;
    std::filesystem::path out = ".";
    /// pooled, benchmark or all.
    std::string policy = "all";
    bool enforce_sla = false;
    bool trace = false;

    // validate-sol
    std::size_t paths = 200;
    double validation_minutes = 7200.0;
    LoadMode load_mode = LoadMode::pointwise;

    // diagnose
    std::filesystem::path arrivals_file;
    double interval_minutes = 5.0;
};

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_sla_failure = 1;
inline constexpr int exit_usage = 2;

/// Preset or file, scaled and validated. Throws ScenarioError or
/// std::runtime_error.
Scenario manifest_scenario(const RunManifest& manifest);

int cmd_plan(const RunManifest& manifest, std::ostream& out);
int cmd_simulate(const RunManifest& manifest, std::ostream& out);
int cmd_validate_sol(const RunManifest& manifest, std::ostream& out);
int cmd_diagnose(const RunManifest& manifest, std::ostream& out);
int cmd_compare(const RunManifest& manifest, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cloudcap
