// SPDX-License-Identifier: Apache-2.0
// Drives the cloudcap executable end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cloudcap/cli.hpp"
#include "cloudcap/scenario.hpp"

namespace fs = std::filesystem;
using namespace cloudcap;

namespace {

struct Result
{
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "cloudcap_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Result run(const std::string& args, const fs::path& dir)
{
    const std::string cmd = std::string("\"") + CLOUDCAP_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout.txt").string()
                            + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');)
        out.push_back(f);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

// Every regular file under root, relative path -> bytes.
std::vector<std::pair<std::string, std::string>> csv_tree(const fs::path& root)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            out.emplace_back(fs::relative(e.path(), root).string(), slurp(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("plan: both policies and the unit-minute gap")
{
    const auto dir = scratch("plan_all");
    const auto r = run("plan --preset near_stationary --policy all --scale 0.1 --out \"" + (dir / "o").string() + "\"", dir);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "o" / "schedule_pooled.csv"));
    CHECK(fs::exists(dir / "o" / "schedule_benchmark.csv"));
    CHECK(r.out.find("benchmark cpu unit-minutes =") != std::string::npos);

    const auto summary = lines(slurp(dir / "o" / "plan_summary.csv"));
    REQUIRE(summary.size() == 5);
    CHECK(summary[0] == "resource,policy,unit_minutes");
    const double pooled = std::stod(split(summary[1])[2]);
    const double bench = std::stod(split(summary[2])[2]);
    CHECK(split(summary[1])[1] == "pooled");
    CHECK(bench >= 1.20 * pooled);

    const auto sched = lines(slurp(dir / "o" / "schedule_benchmark.csv"));
    CHECK(sched[0] == "minute,resource,policy,total,class,dedicated");
    CHECK(lines(slurp(dir / "o" / "schedule_pooled.csv"))[0] == "minute,resource,policy,total");
}

TEST_CASE("plan: pooled only")
{
    const auto dir = scratch("plan_pooled");
    const auto r = run("plan --preset time_varying --policy pooled --out \"" + (dir / "o").string() + "\"", dir);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "o" / "schedule_pooled.csv"));
    CHECK_FALSE(fs::exists(dir / "o" / "schedule_benchmark.csv"));
    // 1440 minutes x 2 resources plus the header
    CHECK(lines(slurp(dir / "o" / "schedule_pooled.csv")).size() == 2881);
}

TEST_CASE("usage errors exit with 2")
{
    const auto dir = scratch("usage");
    const auto out = " --out \"" + (dir / "o").string() + "\"";
    CHECK(run("plan --scenario /nonexistent/none.ini" + out, dir).code == 2);
    auto r = run("simulate --preset near_stationary --policy fastest" + out, dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("fastest") != std::string::npos);
    CHECK(run("plan" + out, dir).code == 2);
    CHECK(run("plan --preset near_stationary --scenario x.ini" + out, dir).code == 2);
    CHECK(run("plan --preset near_stationary --scale 1.5" + out, dir).code == 2);
    CHECK(run("plan --preset weekend" + out, dir).code == 2);
    CHECK(run("bogus" + out, dir).code == 2);
    CHECK(run("", dir).code == 2);

    // invalid scenario lists its violations
    auto sc = builtin_preset("near_stationary");
    sc.classes[2].sla.alpha = 3.0;
    std::ofstream(dir / "bad.ini") << serialize_scenario(sc);
    r = run("plan --scenario \"" + (dir / "bad.ini").string() + "\"" + out, dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("simulate: one seed, pooled only")
{
    const auto dir = scratch("sim_pooled");
    const auto o = dir / "o";
    const auto r = run("simulate --preset near_stationary --scale 0.05 --seeds 1 --policy pooled --enforce-sla --out \"" + o.string() + "\"", dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(o / "pooled" / "seed_0" / "delays.csv"));
    CHECK(fs::exists(o / "pooled" / "seed_0" / "occupancy.csv"));
    CHECK(fs::exists(o / "pooled" / "seed_0" / "losses.csv"));
    CHECK_FALSE(fs::exists(o / "pooled" / "seed_1"));
    CHECK_FALSE(fs::exists(o / "benchmark"));
    CHECK(lines(slurp(o / "pooled" / "seed_0" / "delays.csv"))[0] == "class,arrival_min,delay_min");
    CHECK(lines(slurp(o / "pooled" / "seed_0" / "losses.csv"))[0].rfind("class,count", 0) == 0);
    CHECK(lines(slurp(o / "pooled" / "seed_0" / "occupancy.csv"))[0].rfind("minute,resource,occupied,target", 0) == 0);
    const auto sla = lines(slurp(o / "pooled" / "sla_report.csv"));
    REQUIRE(sla.size() == 6);
    for (std::size_t k = 1; k < sla.size(); ++k)
        CHECK(split(sla[k])[8] == "pass");
}

TEST_CASE("simulate: enforce-sla reports the benchmark failure")
{
    const auto dir = scratch("sim_bench");
    const auto o = dir / "o";
    auto r = run("simulate --preset near_stationary --scale 0.05 --seeds 2 --policy benchmark --trace --out \"" + o.string() + "\"", dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(o / "benchmark" / "seed_1" / "trace.csv"));
    r = run("simulate --preset near_stationary --scale 0.05 --seeds 2 --policy benchmark --enforce-sla --out \"" + o.string() + "\"", dir);
    CHECK(r.code == 1);
    const auto sla = lines(slurp(o / "benchmark" / "sla_report.csv"));
    REQUIRE(sla.size() == 6);
    CHECK(split(sla[5])[0] == "4");
    CHECK(split(sla[5])[8] == "fail");
}

TEST_CASE("validate-sol: two paths and a zero-rate scenario")
{
    const auto dir = scratch("validate");
    {
        const auto o = dir / "p2";
        const auto r = run("validate-sol --preset near_stationary --scale 0.1 --paths 2 --minutes 600 --out \"" + o.string() + "\"", dir);
        REQUIRE(r.code == 0);
        CHECK(lines(slurp(o / "sol_ranks.csv")).size() == 3);
        const auto band = lines(slurp(o / "sol_band.csv"));
        REQUIRE(band.size() == 601);
        CHECK(band[0] == "minute,reference,lower,upper,inside");
        for (std::size_t k = 1; k < band.size(); ++k)
        {
            const auto f = split(band[k]);
            CHECK(std::stod(f[2]) <= std::stod(f[3]));
        }
        CHECK(fs::exists(o / "sol_translation.csv"));
        CHECK(fs::exists(o / "sol_percentiles.csv"));
        CHECK(fs::exists(o / "sol_summary.csv"));
    }
    {
        auto sc = builtin_preset("near_stationary");
        for (auto& c : sc.classes)
            c.rate = RateFunction::constant(0.0);
        std::ofstream(dir / "zero.ini") << serialize_scenario(sc);
        const auto o = dir / "zero";
        const auto r = run("validate-sol --scenario \"" + (dir / "zero.ini").string() + "\" --paths 5 --minutes 120 --out \"" + o.string() + "\"", dir);
        REQUIRE(r.code == 0);
        const auto band = lines(slurp(o / "sol_band.csv"));
        for (std::size_t k = 1; k < band.size(); ++k)
        {
            const auto f = split(band[k]);
            CHECK(std::stod(f[1]) == 0.0);
            CHECK(std::stod(f[2]) == 0.0);
            CHECK(std::stod(f[3]) == 0.0);
        }
    }
}

TEST_CASE("diagnose: arrivals files")
{
    const auto dir = scratch("diagnose");
    const auto o = " --out \"" + (dir / "o").string() + "\"";

    std::ofstream(dir / "one.txt") << "3.5\n";
    auto r = run("diagnose --arrivals \"" + (dir / "one.txt").string() + "\"" + o, dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("warning") != std::string::npos);
    CHECK(r.out.find("undefined") != std::string::npos);

    std::ofstream(dir / "empty.txt") << "";
    CHECK(run("diagnose --arrivals \"" + (dir / "empty.txt").string() + "\"" + o, dir).code == 2);

    {
        std::ofstream os(dir / "even.csv");
        os << "batch_id,arrival_min\n";
        int id = 0;
        for (double t = 0.05; t < 500.0; t += 0.25)
            os << id++ << ',' << t << '\n';
    }
    r = run("diagnose --arrivals \"" + (dir / "even.csv").string() + "\"" + o, dir);
    CHECK(r.code == 0);
    const auto report = lines(slurp(dir / "o" / "ks_report.csv"));
    std::size_t tested = 0;
    std::size_t passed = 0;
    const auto header = split(report[0]);
    const auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    REQUIRE(col("pass") < header.size());
    for (std::size_t k = 1; k < report.size(); ++k)
    {
        const auto f = split(report[k]);
        if (f[col("tested")] == "1")
        {
            ++tested;
            passed += f[col("pass")] == "1";
        }
    }
    REQUIRE(tested > 50);
    CHECK(static_cast<double>(passed) / static_cast<double>(tested) < 0.5);
}

TEST_CASE("diagnose: preset arrivals pass at least 80%")
{
    const auto dir = scratch("diagnose_preset");
    const auto r = run("diagnose --preset near_stationary --out \"" + (dir / "o").string() + "\"", dir);
    REQUIRE(r.code == 0);
    const auto summary = lines(slurp(dir / "o" / "ks_summary.csv"));
    const auto last = split(summary.back());
    REQUIRE(last[0] == "all");
    CHECK(std::stod(last[4]) >= 0.8);
}

TEST_CASE("compare: reruns are byte-identical")
{
    const auto dir = scratch("determinism");
    const std::string args = "compare --preset time_varying --scale 0.05 --seeds 2 --policy all --trace --out ";
    REQUIRE(run(args + "\"" + (dir / "a").string() + "\"", dir).code == 0);
    REQUIRE(run(args + "\"" + (dir / "b").string() + "\"", dir).code == 0);
    const auto a = csv_tree(dir / "a");
    const auto b = csv_tree(dir / "b");
    CHECK(a.size() > 20);
    CHECK(a == b);
    CHECK(fs::exists(dir / "a" / "utilization_cpu.csv"));
}

TEST_CASE("in-process entry point matches the executable")
{
    const auto dir = scratch("inproc");
    std::ostringstream out;
    std::ostringstream err;
    const std::string o = (dir / "o").string();
    std::vector<std::string> args{"cloudcap", "plan", "--preset", "near_stationary", "--policy", "pooled", "--out", o};
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    CHECK(run_cli(static_cast<int>(argv.size()), argv.data(), out, err) == exit_ok);
    const auto r = run("plan --preset near_stationary --policy pooled --out \"" + (dir / "x").string() + "\"", dir);
    CHECK(r.code == 0);
    CHECK(slurp(dir / "o" / "schedule_pooled.csv") == slurp(dir / "x" / "schedule_pooled.csv"));
    CHECK(out.str() == r.out);
}
