// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance run. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cloudcap/analysis.hpp"
#include "cloudcap/engine.hpp"
#include "cloudcap/policies.hpp"
#include "cloudcap/sol.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace cloudcap;

namespace {

constexpr double kDeskScale = 0.1;
constexpr int kSeeds = 10;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    int id;
    std::string name;
    double limit_seconds;  // 0: no limit
    std::function<Outcome()> body;
};

std::string num(double v, int digits = 3)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + CLOUDCAP_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "cloudcap_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> read_summary(const fs::path& p)
{
    std::map<std::string, std::string> out;
    std::istringstream is(slurp(p));
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line))
    {
        const auto comma = line.find(',');
        if (comma != std::string::npos)
            out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

// --- 1 -------------------------------------------------------------------

Outcome sol_moment_fidelity()
{
    // container 1 alone (the VM class is kept with zero rate), starting empty
    auto sc = builtin_preset("near_stationary").scaled(kDeskScale);
    sc.classes.resize(2);
    sc.classes[0].rate = RateFunction::constant(0.0);
    sc.horizon_minutes = 720;
    const auto moments = sol_moments(sc.classes[1], 0, LoadMode::exact);

    std::vector<std::size_t> checkpoints;
    for (std::size_t t = 72; t <= 720 && checkpoints.size() < 10; t += 72)
        if (moments.load(static_cast<double>(t)) >= 50.0)
            checkpoints.push_back(std::min<std::size_t>(t, 719));
    if (checkpoints.size() < 10)
        return {false, "fewer than 10 checkpoints with m(t) >= 50"};

    const int reps = 10000;
    std::vector<std::vector<double>> samples(checkpoints.size(), std::vector<double>(reps));
    const auto unbounded = CapacitySchedule::unbounded(sc.resources, sc.minutes());
#pragma omp parallel for schedule(dynamic, 64)
    for (int r = 0; r < reps; ++r)
    {
        const auto w = generate_workload(sc, 4242, static_cast<std::uint64_t>(r));
        const auto run = simulate(sc, w, unbounded, SimMode::pooled);
        for (std::size_t k = 0; k < checkpoints.size(); ++k)
            samples[k][static_cast<std::size_t>(r)] =
                static_cast<double>(run.partitions[0].occupancy_at[0][checkpoints[k]]);
    }

    double worst_mean = 0.0;
    double worst_var = 0.0;
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
    {
        const double t = static_cast<double>(checkpoints[k]);
        const auto mc = oracle::moments(samples[k]);
        worst_mean = std::max(worst_mean, std::abs(mc.mean / moments.mean(t) - 1.0));
        worst_var = std::max(worst_var, std::abs(mc.variance / moments.variance(t) - 1.0));
    }
    return {worst_mean <= 0.02 && worst_var <= 0.05,
            "max rel. error mean " + num(100 * worst_mean, 2) + "%, variance " + num(100 * worst_var, 2) + "%"};
}

// --- 2 -------------------------------------------------------------------

Outcome diffusion_coverage()
{
    const auto sc = builtin_preset("near_stationary").scaled(kDeskScale);
    std::vector<SolMoments> parts;
    for (const auto& c : sc.classes)
        parts.push_back(sol_moments(c, 0));
    const AggregateSol agg(parts);
    const auto grid = minute_grid(1441);
    const auto paths = diffusion_ensemble(agg, 10000, grid, 2);
    const double curve = agg.percentile(0.9, 1440.0);
    std::size_t below = 0;
    for (std::size_t p = 0; p < paths.paths(); ++p)
        below += paths(p, 1440) < curve;
    const double frac = static_cast<double>(below) / static_cast<double>(paths.paths());
    return {frac >= 0.88 && frac <= 0.92, "coverage " + num(frac, 4)};
}

// --- 3 -------------------------------------------------------------------

Outcome band_containment_check()
{
    const auto dir = scratch("validate");
    const int code = run_cli("validate-sol --preset near_stationary --scale 0.1 --paths 200 --minutes 7200 --out \""
                                 + dir.string() + "\"",
                             dir / "log.txt");
    if (code != 0)
        return {false, "validate-sol exited with " + std::to_string(code)};
    const auto s = read_summary(dir / "sol_summary.csv");
    const double inside = std::stod(s.at("fraction_inside"));
    const double median = std::stod(s.at("translation_median"));
    const bool band_ok = inside >= 0.95;
    const bool translation_ok = median >= 60.0 && median <= 95.0;
    return {band_ok && translation_ok,
            "band " + num(100 * inside, 1) + "% (" + (band_ok ? "ok" : "low") + "), translation median "
                + num(median, 1) + " (" + (translation_ok ? "ok" : "outside [60, 95]") + ")"};
}

// --- 4 -------------------------------------------------------------------

Outcome capacity_gap()
{
    const auto sc = builtin_preset("near_stationary").scaled(kDeskScale);
    const auto pooled = pooled_schedule(sc);
    const auto bench = benchmark_schedule(sc);
    const double cpu = static_cast<double>(bench.unit_minutes(0)) / static_cast<double>(pooled.unit_minutes(0));
    const double ram = static_cast<double>(bench.unit_minutes(1)) / static_cast<double>(pooled.unit_minutes(1));
    return {cpu >= 1.15 && ram >= 1.3, "cpu " + num(cpu) + "x, ram " + num(ram) + "x"};
}

// --- 5, 6, 7 share their runs ---------------------------------------------

std::vector<RunMetrics> replications(const Scenario& sc, const CapacitySchedule& sched, SimMode mode)
{
    std::vector<RunMetrics> runs(kSeeds);
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < kSeeds; ++r)
        runs[static_cast<std::size_t>(r)] =
            simulate(sc, generate_workload(sc, sc.seed, static_cast<std::uint64_t>(r)), sched, mode);
    return runs;
}

std::map<std::string, std::vector<RunMetrics>> pooled_runs;

Outcome pooled_sla()
{
    std::string detail;
    bool ok = true;
    for (const char* preset : {"near_stationary", "time_varying"})
    {
        const auto sc = builtin_preset(preset).scaled(kDeskScale);
        auto runs = replications(sc, pooled_schedule(sc), SimMode::pooled);
        int clean = 0;
        for (const auto& run : runs)
        {
            const auto rep = sla_check(std::span<const RunMetrics>(&run, 1), sc);
            const bool zero = rep.all_pass()
                              && std::all_of(rep.classes.begin(), rep.classes.end(),
                                             [](const SlaClassResult& c) { return c.violations == 0; });
            clean += zero;
        }
        ok = ok && clean >= 9;
        detail += std::string(detail.empty() ? "" : ", ") + preset + " " + std::to_string(clean) + "/10 seeds clean";
        pooled_runs[preset] = std::move(runs);
    }
    return {ok, detail};
}

Outcome benchmark_failure()
{
    const auto sc = builtin_preset("near_stationary").scaled(kDeskScale);
    const auto runs = replications(sc, benchmark_schedule(sc), SimMode::dedicated);
    const auto rep = sla_check(runs, sc);
    const double delayed = delay_survival(runs, 3, std::vector<double>{0.0})[0];
    const bool c4 = rep.job_class(4).status == SlaStatus::fail;
    return {c4 && delayed >= 0.7, std::string("class 4 ") + to_string(rep.job_class(4).status) + " (tail "
                                      + num(rep.job_class(4).tail) + "), class 3 delayed " + num(100 * delayed, 1)
                                      + "%"};
}

Outcome utilization_ceiling()
{
    auto& runs = pooled_runs["near_stationary"];
    if (runs.empty())
    {
        const auto sc = builtin_preset("near_stationary").scaled(kDeskScale);
        runs = replications(sc, pooled_schedule(sc), SimMode::pooled);
    }
    double peak = 0.0;
    for (const auto& run : runs)
    {
        const auto u = utilization_series(run.partitions[0], 0);
        peak = std::max(peak, *std::max_element(u.ratio.begin(), u.ratio.end()));
    }
    const auto table = utilization_table(runs, 0);
    const double worst_bin = *std::max_element(table[0].bins.begin(), table[0].bins.end());
    return {peak < 1.0 && worst_bin < 90.0 && table[0].bins.size() == 12,
            "peak minute " + num(100 * peak, 1) + "%, highest 2-hour bin " + num(worst_bin, 1) + "%"};
}

// --- 8 -------------------------------------------------------------------

Outcome ks_diagnostic()
{
    std::size_t tested = 0;
    std::size_t passed = 0;
    for (const char* preset : {"near_stationary", "time_varying"})
    {
        const auto sc = builtin_preset(preset);
        for (const auto& c : sc.classes)
        {
            Rng rng = make_rng(sc.seed, StreamTag::workload, static_cast<std::uint64_t>(c.class_id), 0);
            const auto times = generate_batch_times(c.rate, sc.horizon_minutes, rng);
            const auto rep = nhpp_ks_test(times, 5.0, sc.horizon_minutes);
            tested += rep.tested;
            passed += rep.passed;
        }
    }
    const double preset_rate = static_cast<double>(passed) / static_cast<double>(tested);

    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    int null_pass = 0;
    for (int k = 0; k < 1000; ++k)
    {
        std::vector<double> xs(20);
        for (auto& x : xs)
            x = e(rng);
        null_pass += 1.0 - kolmogorov_cdf(xs.size(), ks_statistic_exp1(xs)) > 0.05;
    }
    const double null_rate = null_pass / 1000.0;
    return {preset_rate >= 0.8 && std::abs(null_rate - 0.95) <= 0.02,
            "preset pass rate " + num(100 * preset_rate, 1) + "%, Exp(1) null " + num(100 * null_rate, 1) + "%"};
}

// --- 9 -------------------------------------------------------------------

Outcome oracle_equivalence()
{
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed : {101u, 202u, 303u})
    {
        const double horizon = 600.0;
        auto sc = oracle::single_resource_scenario(0.5 + 0.1 * static_cast<double>(seed % 7), 11.0, horizon);
        sc.classes[1].batch_size = DiscretePmf({1, 2}, {0.8, 0.2});
        const auto w = generate_workload(sc, seed, 0);

        std::vector<std::int64_t> servers(sc.minutes());
        for (std::size_t m = 0; m < servers.size(); ++m)
            servers[m] = 3 + static_cast<std::int64_t>((m / 45 + seed) % 5);
        CapacitySchedule sched;
        sched.policy = "fixed";
        sched.resources = sc.resources;
        sched.total = {servers};

        SimOptions opts;
        opts.trace = true;
        const auto run = simulate(sc, w, sched, SimMode::pooled, opts);
        std::vector<oracle::QueueJob> jobs;
        for (const auto& b : w)
            for (const auto& j : b.jobs)
                if (j.arrival_time < horizon)
                    jobs.push_back({j.job_id, j.arrival_time, j.service_duration});
        const auto want = oracle::multi_server_queue(jobs, servers, horizon);

        std::vector<oracle::Event> got;
        for (const auto& e : run.trace)
            if (e.event == "arrival" || e.event == "start" || e.event == "complete")
                got.push_back({e.time, e.event, e.job_id});
        const bool same = got == want.events;
        ok = ok && same;
        detail += std::string(detail.empty() ? "" : ", ") + "seed " + std::to_string(seed) + " "
                  + std::to_string(got.size()) + " events " + (same ? "match" : "differ");
    }
    return {ok, detail};
}

// --- 10 ------------------------------------------------------------------

Outcome cli_determinism()
{
    const auto dir = scratch("determinism");
    const std::vector<std::string> commands{
        "plan --preset time_varying --policy all",
        "compare --preset near_stationary --scale 0.05 --seeds 3 --policy all --trace",
        "validate-sol --preset near_stationary --scale 0.1 --paths 20 --minutes 1440",
        "diagnose --preset time_varying",
    };
    bool ok = true;
    std::size_t files = 0;
    for (std::size_t k = 0; k < commands.size(); ++k)
    {
        std::vector<std::map<std::string, std::string>> trees;
        for (const char* side : {"a", "b"})
        {
            const auto out = dir / std::to_string(k) / side;
            if (run_cli(commands[k] + " --out \"" + out.string() + "\"", dir / "log.txt") != 0)
                return {false, "'" + commands[k] + "' failed"};
            std::map<std::string, std::string> tree;
            for (const auto& e : fs::recursive_directory_iterator(out))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    tree[fs::relative(e.path(), out).string()] = slurp(e.path());
            trees.push_back(std::move(tree));
        }
        ok = ok && !trees[0].empty() && trees[0] == trees[1];
        files += trees[0].size();
    }
    return {ok, std::to_string(files) + " CSV files compared across " + std::to_string(commands.size()) + " commands"};
}

}  // namespace

int main()
{
    apply_thread_limit();
    const std::vector<Criterion> criteria{
        {1, "SOL moment fidelity", 120, sol_moment_fidelity},
        {2, "diffusion percentile coverage", 60, diffusion_coverage},
        {3, "band containment and percentile translation", 300, band_containment_check},
        {4, "capacity gap", 120, capacity_gap},
        {5, "pooled SLA satisfaction", 900, pooled_sla},
        {6, "benchmark failure mode", 900, benchmark_failure},
        {7, "utilization ceiling", 0, utilization_ceiling},
        {8, "KS diagnostic", 0, ks_diagnostic},
        {9, "engine oracle equivalence", 0, oracle_equivalence},
        {10, "determinism", 0, cli_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.body();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.pass;
        std::string timing = num(secs, 1) + "s";
        if (c.limit_seconds > 0 && secs > c.limit_seconds)
        {
            pass = false;
            timing += " over the " + num(c.limit_seconds, 0) + "s limit";
        }
        failures += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << o.detail << "; "
                  << timing << ")" << std::endl;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
    return failures ? 1 : 0;
}
