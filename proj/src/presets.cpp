// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cmath>

#include "cloudcap/scenario.hpp"

namespace cloudcap {
namespace {

constexpr double kDay = 1440.0;
constexpr double kContainerCap = 480.0;

// Maximum-entropy style fits on typical flavor sizes. Batch sizes follow a
// truncated power law on 1..19 (mean 1.439, sd 1.345); CPU cores and RAM GB
// sit on powers of two (CPU mean 4.108 sd 7.81, RAM mean 11.54 sd 34.50).
DiscretePmf batch_pmf()
{
    return DiscretePmf({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19},
                       {0.79779, 0.11746, 0.0383, 0.0173, 0.00933, 0.00564, 0.00368, 0.00255, 0.00184,
                        0.00137, 0.00106, 0.00083, 0.00067, 0.00054, 0.00045, 0.00037, 0.00032, 0.00027,
                        0.00023});
}

DiscretePmf cpu_pmf()
{
    return DiscretePmf({1, 2, 4, 8, 16, 32, 64},
                       {0.43451, 0.26292, 0.1504, 0.08133, 0.04157, 0.02009, 0.00918});
}

DiscretePmf ram_pmf()
{
    return DiscretePmf({1, 2, 4, 8, 16, 32, 64, 128, 256},
                       {0.39046, 0.23053, 0.14017, 0.08776, 0.05659, 0.03758, 0.0257, 0.01809, 0.01312});
}

// Placeholder VM intensity: 19,000 batches per day shaped by
// f(u) = 0.6 + 1.8u - 0.6u^2 - 1.2u^3 with u = t / 1440, which integrates to 1
// over a day, starts and ends at 0.6 and peaks early afternoon.
RateFunction vm_rate()
{
    const double r = 19000.0 / kDay;
    return RateFunction({r * 0.6, r * 1.8 / kDay, -r * 0.6 / (kDay * kDay), -r * 1.2 / (kDay * kDay * kDay)},
                        std::nullopt, kDay);
}

struct ContainerRow
{
    std::array<double, 3> coeffs;  // ascending powers
    std::optional<Interval> window;
    double service_mean;
    double service_sd;
};

JobClassSpec make_class(int id, std::string name, RateFunction rate, ServiceDistribution service, Sla sla)
{
    JobClassSpec c;
    c.class_id = id;
    c.name = std::move(name);
    c.is_loss_class = (id == 0);
    c.rate = std::move(rate);
    c.batch_size = batch_pmf();
    c.service = std::move(service);
    c.requirements = {cpu_pmf(), ram_pmf()};
    c.sla = sla;
    return c;
}

Scenario make_preset(std::string name,
                     double vm_service_mean,
                     double vm_service_sd,
                     const std::array<ContainerRow, 4>& rows)
{
    Scenario s;
    s.name = std::move(name);
    s.resources = {"cpu", "ram"};
    s.dominant = 0;
    s.epsilon = 0.01;
    s.horizon_minutes = kDay;
    s.warmup_minutes = kDay;
    s.seed = 20230601;

    s.classes.push_back(make_class(0, "vm", vm_rate(),
                                   ServiceDistribution(LognormalService{vm_service_mean, vm_service_sd}),
                                   Sla{0.0, 0.01}));
    const std::array<double, 4> taus{90.0, 90.0, 450.0, 900.0};
    for (int i = 0; i < 4; ++i)
    {
        const auto& row = rows[static_cast<std::size_t>(i)];
        RateFunction rate({row.coeffs[0], row.coeffs[1], row.coeffs[2]}, row.window, kDay);
        ServiceDistribution service(LognormalService{row.service_mean, row.service_sd}, kContainerCap);
        s.classes.push_back(make_class(i + 1, "container" + std::to_string(i + 1), std::move(rate),
                                       std::move(service), Sla{taus[static_cast<std::size_t>(i)], 0.2}));
    }
    return s;
}

Scenario near_stationary()
{
    const std::array<ContainerRow, 4> rows{{
        {{191875.0 / 13941.0, -155.0 / 297408.0, -1.0 / 3568896.0}, std::nullopt, 89.589, 172.306},
        {{729125.0 / 56628.0, 19.0 / 28512.0, -19.0 / 81544320.0}, std::nullopt, 89.439, 172.170},
        {{25353125.0 / 1923228.0, 1235.0 / 5769684.0, -19.0 / 92314944.0}, std::nullopt, 89.744, 172.293},
        {{33071875.0 / 2674332.0, 29165.0 / 21394656.0, -19.0 / 85578624.0}, std::nullopt, 89.417, 171.969},
    }};
    return make_preset("near_stationary", 666.424, 1681.0, rows);
}

Scenario time_varying()
{
    // Each quadratic is positive exactly between its roots; the windows repeat
    // those roots so the active periods are explicit.
    const std::array<ContainerRow, 4> rows{{
        {{-11400.0, 665.0 / 12.0, -19.0 / 288.0}, Interval{360.0, 480.0}, 89.671, 172.326},
        {{-68400.0, 1615.0 / 12.0, -19.0 / 288.0}, Interval{960.0, 1080.0}, 89.412, 172.547},
        {{-118.75, 95.0 / 216.0, -19.0 / 62208.0}, Interval{360.0, 1080.0}, 89.631, 172.321},
        {{-114712.5, 1045.0 / 6.0, -19.0 / 288.0}, Interval{1260.0, 1380.0}, 90.043, 171.691},
    }};
    return make_preset("time_varying", 667.588, 1682.0, rows);
}

}  // namespace

std::vector<std::string> preset_names() { return {"near_stationary", "time_varying"}; }

Scenario builtin_preset(std::string_view name)
{
    if (name == "near_stationary")
        return near_stationary();
    if (name == "time_varying")
        return time_varying();
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace cloudcap
