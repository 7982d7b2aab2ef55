// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cloudcap/analysis.hpp"
#include "cloudcap/arrivals.hpp"
#include "cloudcap/engine.hpp"
#include "cloudcap/policies.hpp"
#include "cloudcap/report.hpp"

namespace fs = std::filesystem;

namespace cloudcap {

namespace {

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> selected_policies(const RunManifest& m)
{
    if (m.policy == "all")
        return {"pooled", "benchmark"};
    if (m.policy == "pooled" || m.policy == "benchmark")
        return {m.policy};
    throw UsageError("unknown policy '" + m.policy + "' (expected pooled, benchmark or all)");
}

CapacitySchedule schedule_for(const std::string& policy, const Scenario& sc)
{
    return policy == "pooled" ? pooled_schedule(sc) : benchmark_schedule(sc);
}

std::string percent(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::vector<CapacitySchedule> write_plan(const RunManifest& m, const Scenario& sc, std::ostream& out)
{
    fs::create_directories(m.out);
    std::vector<CapacitySchedule> schedules;
    for (const auto& policy : selected_policies(m))
    {
        auto s = schedule_for(policy, sc);
        auto os = open_output(m.out / ("schedule_" + policy + ".csv"));
        write_schedule_csv(os, s, sc);
        schedules.push_back(std::move(s));
    }

    auto os = open_output(m.out / "plan_summary.csv");
    os << "resource,policy,unit_minutes\n";
    for (std::size_t n = 0; n < sc.resources.size(); ++n)
        for (const auto& s : schedules)
        {
            os << sc.resources[n] << ',' << s.policy << ',' << s.unit_minutes(n) << '\n';
            out << s.policy << ' ' << sc.resources[n] << " unit-minutes: " << s.unit_minutes(n) << '\n';
        }
    if (schedules.size() == 2)
    {
        for (std::size_t n = 0; n < sc.resources.size(); ++n)
        {
            const auto pooled = static_cast<double>(schedules[0].unit_minutes(n));
            const auto bench = static_cast<double>(schedules[1].unit_minutes(n));
            if (pooled > 0.0)
                out << "benchmark " << sc.resources[n] << " unit-minutes = " << percent(bench / pooled)
                    << " x pooled (" << percent(100.0 * (bench - pooled) / pooled) << "% more)\n";
        }
    }
    return schedules;
}

struct PolicyRuns
{
    CapacitySchedule schedule;
    std::vector<RunMetrics> runs;
};

std::vector<PolicyRuns> run_replications(const RunManifest& m,
                                         const Scenario& sc,
                                         std::vector<CapacitySchedule> schedules)
{
    std::vector<PolicyRuns> result;
    for (auto& s : schedules)
    {
        result.push_back({std::move(s), {}});
        result.back().runs.resize(m.seeds);
    }

    const auto tasks = static_cast<long long>(result.size() * m.seeds);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));
    SimOptions opts;
    opts.trace = m.trace;
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < tasks; ++k)
    {
        const auto p = static_cast<std::size_t>(k) / m.seeds;
        const auto r = static_cast<std::size_t>(k) % m.seeds;
        try
        {
            // Workload streams do not depend on the policy.
            const auto workload = generate_workload(sc, sc.seed, r);
            auto& pr = result[p];
            const auto mode = pr.schedule.has_dedicated() ? SimMode::dedicated : SimMode::pooled;
            pr.runs[r] = simulate(sc, workload, pr.schedule, mode, opts);
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return result;
}

SlaReport write_policy_outputs(const RunManifest& m, const Scenario& sc, const PolicyRuns& pr, std::ostream& out)
{
    const fs::path dir = m.out / pr.schedule.policy;
    fs::create_directories(dir);
    for (std::size_t r = 0; r < pr.runs.size(); ++r)
    {
        const fs::path sd = dir / ("seed_" + std::to_string(r));
        fs::create_directories(sd);
        {
            auto os = open_output(sd / "delays.csv");
            write_delays_csv(os, pr.runs[r]);
        }
        {
            auto os = open_output(sd / "occupancy.csv");
            write_occupancy_csv(os, pr.runs[r]);
        }
        {
            auto os = open_output(sd / "losses.csv");
            write_losses_csv(os, pr.runs[r]);
        }
        if (m.trace)
        {
            auto os = open_output(sd / "trace.csv");
            write_trace_csv(os, pr.runs[r]);
        }
    }

    const auto report = sla_check(pr.runs, sc);
    {
        auto os = open_output(dir / "sla_report.csv");
        write_sla_csv(os, report);
    }

    std::vector<double> grid(sc.minutes() + 1);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = static_cast<double>(k);
    for (const auto& spec : sc.classes)
    {
        if (spec.is_loss_class)
            continue;
        if (report.job_class(spec.class_id).arrivals == 0)
            continue;
        const auto surv = delay_survival(pr.runs, spec.class_id, grid);
        auto os = open_output(dir / ("survival_" + std::to_string(spec.class_id) + ".csv"));
        write_survival_csv(os, grid, surv);
    }
    for (std::size_t n = 0; n < sc.resources.size(); ++n)
    {
        const auto rows = utilization_table(pr.runs, n);
        auto os = open_output(dir / ("utilization_" + sc.resources[n] + ".csv"));
        write_utilization_csv(os, rows, 120);
    }

    std::size_t runs = 0;
    for (const auto& r : pr.runs)
        runs += r.partitions.size();
    out << pr.schedule.policy << ": " << pr.runs.size() << " seed(s), " << runs << " run(s)\n";
    for (const auto& c : report.classes)
    {
        out << "  class " << c.class_id << " (" << c.name << ") " << (c.loss_class ? "lost" : "P(D>tau)") << " = "
            << fmt(c.tail) << " alpha = " << fmt(c.alpha) << " -> " << to_string(c.status) << '\n';
    }
    return report;
}

int simulate_and_report(const RunManifest& m, const Scenario& sc, std::vector<CapacitySchedule> schedules,
                        std::ostream& out, bool combined_tables)
{
    const auto results = run_replications(m, sc, std::move(schedules));
    bool failed = false;
    for (const auto& pr : results)
        failed |= !write_policy_outputs(m, sc, pr, out).all_pass();

    if (combined_tables)
    {
        for (std::size_t n = 0; n < sc.resources.size(); ++n)
        {
            std::vector<UtilizationRow> rows;
            for (const auto& pr : results)
                for (auto& row : utilization_table(pr.runs, n))
                {
                    if (pr.schedule.policy != row.label)
                        row.label = pr.schedule.policy + ":" + row.label;
                    rows.push_back(std::move(row));
                }
            auto os = open_output(m.out / ("utilization_" + sc.resources[n] + ".csv"));
            write_utilization_csv(os, rows, 120);
        }
    }
    if (failed && m.enforce_sla)
    {
        out << "SLA failure\n";
        return exit_sla_failure;
    }
    return exit_ok;
}

std::vector<double> read_arrival_times(const fs::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read arrivals file " + path.string());
    std::vector<double> times;
    std::string line;
    std::size_t column = 0;
    std::optional<std::size_t> batch_column;
    std::set<std::string> seen_batches;
    bool first = true;
    while (std::getline(is, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (first)
        {
            first = false;
            bool header = false;
            for (std::size_t k = 0; k < cells.size(); ++k)
            {
                if (cells[k] == "arrival_min" || cells[k] == "t_min")
                {
                    column = k;
                    header = true;
                }
                if (cells[k] == "batch_id")
                    batch_column = k;
            }
            if (header)
                continue;
            batch_column.reset();
        }
        if (column >= cells.size())
            throw std::runtime_error("arrivals file: short row");
        if (batch_column && !seen_batches.insert(cells.at(*batch_column)).second)
            continue;
        times.push_back(std::stod(cells[column]));
    }
    return times;
}

}  // namespace

Scenario manifest_scenario(const RunManifest& m)
{
    Scenario sc;
    if (!m.preset.empty() && !m.scenario_file.empty())
        throw UsageError("--preset and --scenario are mutually exclusive");
    if (!m.preset.empty())
        sc = builtin_preset(m.preset);
    else if (!m.scenario_file.empty())
        sc = load_scenario(m.scenario_file);
    else
        throw UsageError("one of --preset or --scenario is required");
    if (!(m.scale > 0.0 && m.scale <= 1.0))
        throw UsageError("--scale must lie in (0, 1]");
    if (m.scale != 1.0)
        sc = sc.scaled(m.scale);
    return checked(std::move(sc));
}

int cmd_plan(const RunManifest& m, std::ostream& out)
{
    const auto sc = manifest_scenario(m);
    write_plan(m, sc, out);
    return exit_ok;
}

int cmd_simulate(const RunManifest& m, std::ostream& out)
{
    const auto sc = manifest_scenario(m);
    fs::create_directories(m.out);
    std::vector<CapacitySchedule> schedules;
    for (const auto& policy : selected_policies(m))
        schedules.push_back(schedule_for(policy, sc));
    return simulate_and_report(m, sc, std::move(schedules), out, false);
}

int cmd_compare(const RunManifest& m, std::ostream& out)
{
    const auto sc = manifest_scenario(m);
    auto schedules = write_plan(m, sc, out);
    return simulate_and_report(m, sc, std::move(schedules), out, true);
}

int cmd_validate_sol(const RunManifest& m, std::ostream& out)
{
    auto sc = manifest_scenario(m);
    if (!(m.validation_minutes > 0.0))
        throw UsageError("--minutes must be positive");
    if (m.paths < 2)
        throw UsageError("--paths must be at least 2");
    sc.horizon_minutes = m.validation_minutes;
    const std::size_t minutes = sc.minutes();
    const std::size_t dom = sc.dominant_index();
    fs::create_directories(m.out);

    std::vector<SolMoments> parts;
    for (const auto& spec : sc.classes)
        parts.push_back(sol_moments(spec, dom, m.load_mode));
    const AggregateSol agg(std::move(parts));
    const auto grid = minute_grid(minutes);
    const auto paths = diffusion_ensemble(agg, m.paths, grid, sc.seed);

    const auto workload = generate_workload(sc, sc.seed, 0);
    const auto run = simulate(sc, workload, CapacitySchedule::unbounded(sc.resources, minutes), SimMode::pooled);
    std::vector<double> reference(minutes);
    for (std::size_t t = 0; t < minutes; ++t)
        reference[t] = static_cast<double>(run.partitions.front().occupancy_at[dom][t]);

    const auto ranked = rank_paths(paths);
    const auto warmup = static_cast<std::size_t>(std::ceil(sc.warmup_minutes));
    const auto band = band_containment(reference, paths, ranked, warmup);
    const auto translation = percentile_translation(reference, paths);

    {
        auto os = open_output(m.out / "sol_band.csv");
        write_band_csv(os, reference, band);
    }
    {
        auto os = open_output(m.out / "sol_translation.csv");
        write_translation_csv(os, reference, translation);
    }
    {
        auto os = open_output(m.out / "sol_ranks.csv");
        write_ranks_csv(os, ranked);
    }
    {
        std::vector<std::string> names{"p10", "p50", "p90"};
        std::vector<std::vector<double>> curves(3, std::vector<double>(minutes));
        for (std::size_t t = 0; t < minutes; ++t)
        {
            curves[0][t] = agg.percentile(0.1, grid[t]);
            curves[1][t] = agg.percentile(0.5, grid[t]);
            curves[2][t] = agg.percentile(0.9, grid[t]);
        }
        auto os = open_output(m.out / "sol_percentiles.csv");
        write_curves_csv(os, names, curves);
    }

    std::vector<double> settled(translation.begin() + static_cast<std::ptrdiff_t>(std::min(warmup, minutes)),
                                translation.end());
    double median = 0.0;
    if (!settled.empty())
    {
        std::sort(settled.begin(), settled.end());
        median = settled[settled.size() / 2];
    }
    const bool pass = band.fraction_inside >= 0.95;
    {
        auto os = open_output(m.out / "sol_summary.csv");
        os << "metric,value\n";
        os << "paths," << m.paths << '\n';
        os << "minutes," << minutes << '\n';
        os << "upper_rank," << band.upper_rank << '\n';
        os << "lower_rank," << band.lower_rank << '\n';
        os << "fraction_inside," << fmt(band.fraction_inside) << '\n';
        os << "translation_median," << fmt(median) << '\n';
        os << "band_pass," << (pass ? 1 : 0) << '\n';
    }
    out << "band containment after warm-up: " << percent(100.0 * band.fraction_inside) << "% of minutes ("
        << (pass ? "pass" : "fail") << ")\n";
    out << "median percentile translation after warm-up: " << percent(median) << '\n';
    return exit_ok;
}

int cmd_diagnose(const RunManifest& m, std::ostream& out)
{
    fs::create_directories(m.out);
    if (!(m.interval_minutes > 0.0))
        throw UsageError("--interval must be positive");

    auto report_line = [&](const std::string& label, const KsReport& r) {
        out << label << ": tested " << r.tested << ", passed " << r.passed << ", skipped " << r.skipped;
        if (auto rate = r.pass_rate())
            out << ", pass rate " << percent(100.0 * *rate) << "%\n";
        else
            out << ", pass rate undefined\n";
    };

    if (!m.arrivals_file.empty())
    {
        const auto times = read_arrival_times(m.arrivals_file);
        if (times.empty())
            throw std::runtime_error("arrivals file contains no arrivals");
        const double last = *std::max_element(times.begin(), times.end());
        const double horizon = (std::floor(last / m.interval_minutes) + 1.0) * m.interval_minutes;
        const auto r = nhpp_ks_test(times, m.interval_minutes, horizon);
        auto os = open_output(m.out / "ks_report.csv");
        write_ks_csv(os, r);
        report_line("arrivals", r);
        if (!r.pass_rate())
            out << "warning: every interval had fewer than 5 arrivals\n";
        return exit_ok;
    }

    const auto sc = manifest_scenario(m);
    std::ofstream summary = open_output(m.out / "ks_summary.csv");
    summary << "class,tested,passed,skipped,pass_rate\n";
    std::size_t tested = 0;
    std::size_t passed = 0;
    for (const auto& spec : sc.classes)
    {
        auto rng = make_rng(sc.seed, StreamTag::workload, static_cast<std::uint64_t>(spec.class_id), 0);
        const auto times = generate_batch_times(spec.rate, sc.horizon_minutes, rng);
        const auto r = nhpp_ks_test(times, m.interval_minutes, sc.horizon_minutes);
        auto os = open_output(m.out / ("ks_report_" + std::to_string(spec.class_id) + ".csv"));
        write_ks_csv(os, r);
        summary << spec.class_id << ',' << r.tested << ',' << r.passed << ',' << r.skipped << ','
                << (r.pass_rate() ? fmt(*r.pass_rate()) : "") << '\n';
        report_line("class " + std::to_string(spec.class_id), r);
        tested += r.tested;
        passed += r.passed;
    }
    if (tested > 0)
    {
        const double rate = static_cast<double>(passed) / static_cast<double>(tested);
        summary << "all," << tested << ',' << passed << ",," << fmt(rate) << '\n';
        out << "aggregate pass rate " << percent(100.0 * rate) << "%\n";
    }
    else
    {
        out << "warning: no interval had enough arrivals to test\n";
    }
    return exit_ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Capacity planning and simulation for multi-class batch cloud workloads"};
    RunManifest m;
    std::string load_mode = "pointwise";

    app.add_option("--preset", m.preset, "Built-in scenario")->check(CLI::IsMember(preset_names()));
    app.add_option("--scenario", m.scenario_file, "Scenario file");
    app.add_option("--seeds", m.seeds, "Number of replications")->check(CLI::PositiveNumber);
    app.add_option("--scale", m.scale, "Multiply every arrival rate by this factor in (0, 1]");
    app.add_option("--out", m.out, "Output directory");
    app.add_option("--policy", m.policy, "pooled, benchmark or all");
    app.add_flag("--enforce-sla", m.enforce_sla, "Exit 1 when any class misses its SLA");
    app.require_subcommand(1);

    auto* plan = app.add_subcommand("plan", "Write capacity schedules")->fallthrough();
    auto* sim = app.add_subcommand("simulate", "Simulate schedules and check SLAs")->fallthrough();
    sim->add_flag("--trace", m.trace, "Write event traces");
    auto* val = app.add_subcommand("validate-sol", "Check diffusion paths against simulated load")->fallthrough();
    val->add_option("--paths", m.paths, "Number of diffusion paths");
    val->add_option("--minutes", m.validation_minutes, "Validation horizon");
    val->add_option("--load-mode", load_mode, "pointwise or exact")
        ->check(CLI::IsMember({"pointwise", "exact"}));
    auto* diag = app.add_subcommand("diagnose", "KS test of arrival times")->fallthrough();
    diag->add_option("--arrivals", m.arrivals_file, "CSV or one time per line");
    diag->add_option("--interval", m.interval_minutes, "Interval length in minutes");
    auto* cmp = app.add_subcommand("compare", "plan + simulate + reports")->fallthrough();
    cmp->add_flag("--trace", m.trace, "Write event traces");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    m.load_mode = load_mode == "exact" ? LoadMode::exact : LoadMode::pointwise;

    try
    {
        apply_thread_limit();
        if (plan->parsed())
            return cmd_plan(m, out);
        if (sim->parsed())
            return cmd_simulate(m, out);
        if (val->parsed())
            return cmd_validate_sol(m, out);
        if (diag->parsed())
            return cmd_diagnose(m, out);
        if (cmp->parsed())
            return cmd_compare(m, out);
    }
    catch (const ScenarioError& e)
    {
        err << "invalid scenario:\n";
        for (const auto& v : e.violations())
            err << "  " << v << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace cloudcap
