// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "cloudcap/arrivals.hpp"
#include "support/oracles.hpp"

using namespace cloudcap;

TEST_CASE("rate_at: printed coefficients at t = 0")
{
    const auto sc = builtin_preset("near_stationary");
    CHECK(rate_at(sc.classes[1].rate, 0.0) == doctest::Approx(191875.0 / 13941.0));
    CHECK(rate_at(sc.classes[1].rate, 0.0) == doctest::Approx(13.764).epsilon(1e-4));
}

TEST_CASE("rate_at: window and clamp")
{
    const RateFunction windowed({5.0}, Interval{10.0, 20.0});
    CHECK(rate_at(windowed, 9.999) == 0.0);
    CHECK(rate_at(windowed, 10.0) == 5.0);
    CHECK(rate_at(windowed, 20.0) == 0.0);
    CHECK(rate_at(windowed, 100.0) == 0.0);

    // 1 - (t - 5)^2 / 4 is negative outside [3, 7].
    const RateFunction dips({1.0 - 25.0 / 4.0, 10.0 / 4.0, -1.0 / 4.0});
    CHECK(rate_at(dips, 0.0) == 0.0);
    CHECK(rate_at(dips, 5.0) == doctest::Approx(1.0));
    CHECK(rate_at(dips, 8.0) == 0.0);
    for (double t = 0; t < 20; t += 0.37)
        CHECK(rate_at(dips, t) >= 0.0);
}

TEST_CASE("integrate_rate")
{
    CHECK(integrate_rate(RateFunction::constant(10.0), 0.0, 60.0) == doctest::Approx(600.0));
    const auto sc = builtin_preset("near_stationary");
    CHECK(integrate_rate(sc.classes[1].rate, 300.0, 300.0) == 0.0);

    SUBCASE("clamped and windowed pieces against numeric quadrature")
    {
        const RateFunction dips({1.0 - 25.0 / 4.0, 10.0 / 4.0, -1.0 / 4.0}, Interval{4.0, 100.0});
        // split at the window edge (a jump) and the clamp kink
        auto f = [&](double t) { return dips(t); };
        const double numeric =
            oracle::simpson(f, 0.0, std::nextafter(4.0, 0.0), 2000) + oracle::simpson(f, 4.0, 7.0, 2000) + oracle::simpson(f, 7.0, 12.0, 2000);
        CHECK(integrate_rate(dips, 0.0, 12.0) == doctest::Approx(numeric).epsilon(1e-6));
        // closed form over [4, 7]: int 1 - (t-5)^2/4 = 3 - (8 + 1)/12
        CHECK(integrate_rate(dips, 0.0, 12.0) == doctest::Approx(3.0 - 9.0 / 12.0));
    }
    SUBCASE("periodic rate repeats its day")
    {
        const auto tv = builtin_preset("time_varying");
        const auto& r = tv.classes[1].rate;
        CHECK(integrate_rate(r, 0.0, 2880.0) == doctest::Approx(2.0 * integrate_rate(r, 0.0, 1440.0)));
        CHECK(r(400.0 + 1440.0) == doctest::Approx(r(400.0)));
    }
}

TEST_CASE("generate_batch_times: zero rate")
{
    Rng rng(1);
    CHECK(generate_batch_times(RateFunction::constant(0.0), 1000.0, rng).empty());
}

TEST_CASE("generate_batch_times: constant rate count mean and variance")
{
    const auto rate = RateFunction::constant(10.0);
    std::vector<double> counts;
    for (int rep = 0; rep < 1000; ++rep)
    {
        Rng rng(static_cast<std::uint64_t>(rep) * 7919 + 3);
        const auto times = generate_batch_times(rate, 1000.0, rng);
        counts.push_back(static_cast<double>(times.size()));
    }
    const auto m = oracle::moments(counts);
    // 3 standard errors: sqrt(10000 / 1000) for the mean, 10000 sqrt(2 / 999) for the variance.
    CHECK(std::abs(m.mean - 10000.0) < 3.0 * std::sqrt(10.0));
    CHECK(std::abs(m.variance - 10000.0) < 3.0 * 10000.0 * std::sqrt(2.0 / 999.0));
}

TEST_CASE("generate_batch_times: strictly increasing and inside the horizon")
{
    const auto sc = builtin_preset("near_stationary");
    Rng rng(5);
    const auto times = generate_batch_times(sc.classes[2].rate, 1440.0, rng);
    REQUIRE(times.size() > 1000);
    for (std::size_t k = 1; k < times.size(); ++k)
        CHECK(times[k] > times[k - 1]);
    CHECK(times.front() >= 0.0);
    CHECK(times.back() < 1440.0);
}

TEST_CASE("generate_batch_times: time-varying class 1 stays inside its window")
{
    const auto sc = builtin_preset("time_varying");
    Rng rng(11);
    const auto times = generate_batch_times(sc.classes[1].rate, 3 * 1440.0, rng);
    REQUIRE_FALSE(times.empty());
    for (double t : times)
    {
        const double local = std::fmod(t, 1440.0);
        CHECK(local >= 360.0);
        CHECK(local < 480.0);
    }
}

TEST_CASE("thinning: piecewise-constant interval counts are Poisson")
{
    // Rate 0 on [0,50), 3 on [50,80), 0 after; count in [40, 90) is Poisson(90).
    const RateFunction rate({3.0}, Interval{50.0, 80.0});
    const double mean = integrate_rate(rate, 40.0, 90.0);
    REQUIRE(mean == doctest::Approx(90.0));

    std::map<long, int> hist;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep)
    {
        Rng rng(static_cast<std::uint64_t>(rep) + 100);
        const auto times = generate_batch_times(rate, 120.0, rng);
        long n = 0;
        for (double t : times)
            n += (t >= 40.0 && t < 90.0);
        hist[n] += 1;
    }

    // Bins with expected count >= 5, tails pooled.
    auto pmf = [&](long k) { return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0)); };
    std::vector<std::pair<long, long>> bins;  // [lo, hi]
    long lo = 0;
    double acc = 0.0;
    for (long k = 0; k < 300; ++k)
    {
        acc += pmf(k) * reps;
        if (acc >= 5.0 && (1.0 - [&] {
                double c = 0;
                for (long j = 0; j <= k; ++j)
                    c += pmf(j);
                return c;
            }()) * reps >= 5.0)
        {
            bins.emplace_back(lo, k);
            lo = k + 1;
            acc = 0.0;
        }
    }
    bins.emplace_back(lo, 100000);

    double chi2 = 0.0;
    for (auto [a, b] : bins)
    {
        double expected = 0.0;
        for (long k = a; k <= std::min(b, 400L); ++k)
            expected += pmf(k) * reps;
        double observed = 0.0;
        for (auto [k, c] : hist)
            if (k >= a && k <= b)
                observed += c;
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
    const double p = 1.0 - boost::math::cdf(dist, chi2);
    CAPTURE(chi2);
    CHECK(p > 0.01);
}

TEST_CASE("workload: degenerate batch size gives single-job batches")
{
    auto sc = builtin_preset("near_stationary").scaled(0.05);
    for (auto& c : sc.classes)
        c.batch_size = DiscretePmf::degenerate(1);
    const auto w = generate_workload(sc, 9, 0);
    REQUIRE_FALSE(w.empty());
    for (const auto& b : w)
        CHECK(b.jobs.size() == 1);
}

TEST_CASE("workload: truncation caps container service at 480")
{
    const auto sc = builtin_preset("near_stationary").scaled(0.2);
    const auto w = generate_workload(sc, 3, 0);
    std::size_t capped = 0;
    for (const auto& b : w)
    {
        if (b.class_id == 0)
            continue;
        for (const auto& j : b.jobs)
        {
            CHECK(j.service_duration <= 480.0);
            capped += (j.service_duration == 480.0);
        }
    }
    CHECK(capped > 0);
}

TEST_CASE("workload: batch, service and requirement structure")
{
    const auto sc = builtin_preset("near_stationary").scaled(0.1);
    const auto w = generate_workload(sc, 17, 0);
    std::uint64_t expected_job = 0;
    for (std::size_t k = 0; k < w.size(); ++k)
    {
        const auto& b = w[k];
        CHECK(b.batch_id == k);
        REQUIRE_FALSE(b.jobs.empty());
        if (k > 0)
            CHECK(b.arrival_time >= w[k - 1].arrival_time);
        for (const auto& j : b.jobs)
        {
            CHECK(j.job_id == expected_job++);
            CHECK(j.batch_id == b.batch_id);
            CHECK(j.class_id == b.class_id);
            CHECK(j.arrival_time == b.arrival_time);
            CHECK(j.service_duration == b.jobs.front().service_duration);
            CHECK(j.service_duration > 0.0);
            for (std::size_t n = 0; n < j.requirement.size(); ++n)
                CHECK(j.requirement[n] >= 1);
        }
    }
}

TEST_CASE("workload: near-stationary batch mean about 1.439 over 10 seeds")
{
    const auto sc = builtin_preset("near_stationary").scaled(0.1);
    double batches = 0;
    double jobs = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const auto w = generate_workload(sc, 1000 + seed, 0);
        batches += static_cast<double>(w.size());
        jobs += static_cast<double>(job_count(w));
    }
    CHECK(jobs / batches == doctest::Approx(1.439).epsilon(0.02 / 1.439));
}

TEST_CASE("workload: determinism is byte-for-byte")
{
    const auto sc = builtin_preset("time_varying").scaled(0.05);
    std::ostringstream a;
    std::ostringstream b;
    write_workload_csv(a, sc, generate_workload(sc, 77, 3));
    write_workload_csv(b, sc, generate_workload(sc, 77, 3));
    CHECK(a.str() == b.str());
    std::ostringstream c;
    write_workload_csv(c, sc, generate_workload(sc, 77, 4));
    CHECK(a.str() != c.str());
    CHECK(a.str().rfind("batch_id,class,arrival_min,jobs,service_min,req_cpu,req_ram\n", 0) == 0);
}

TEST_CASE("workload: service durations across batches are uncorrelated")
{
    auto sc = builtin_preset("near_stationary");
    sc.classes.resize(2);
    const auto w = generate_workload(sc, 5, 0);
    std::vector<double> s;
    for (const auto& b : w)
        if (b.class_id == 1)
            s.push_back(b.jobs.front().service_duration);
    s.resize(10000);
    const auto m = oracle::moments(s);
    double cov = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k)
        cov += (s[k] - m.mean) * (s[k - 1] - m.mean);
    cov /= static_cast<double>(s.size() - 1);
    CHECK(std::abs(cov / m.variance) < 0.05);
}

TEST_CASE("workload: one class slice does not depend on the other classes")
{
    const auto sc = builtin_preset("near_stationary").scaled(0.05);
    auto only = sc;
    only.classes = {sc.classes[0], sc.classes[3]};
    only.classes[1].class_id = 3;
    const auto full = class_slice(generate_workload(sc, 21, 2), 3);
    const auto alone = class_slice(generate_workload(only, 21, 2), 3);
    REQUIRE(full.size() == alone.size());
    for (std::size_t k = 0; k < full.size(); ++k)
    {
        CHECK(full[k].arrival_time == alone[k].arrival_time);
        CHECK(full[k].jobs.size() == alone[k].jobs.size());
        CHECK(full[k].jobs.front().service_duration == alone[k].jobs.front().service_duration);
    }
}
