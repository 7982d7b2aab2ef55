// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cloudcap/analysis.hpp"

namespace cloudcap {

namespace {

using Matrix = std::vector<double>;

void multiply(const Matrix& a, const Matrix& b, Matrix& c, std::size_t m)
{
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k)
        {
            const double aik = a[i * m + k];
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < m; ++j)
                c[i * m + j] += aik * b[k * m + j];
        }
}

// Marsaglia, Tsang and Wang (2003): H^n with a decimal exponent carried
// alongside to avoid overflow.
void matrix_power(const Matrix& h, int eh, Matrix& v, int& ev, std::size_t m, std::size_t n)
{
    if (n == 1)
    {
        v = h;
        ev = eh;
        return;
    }
    Matrix half(m * m);
    matrix_power(h, eh, half, ev, m, n / 2);
    Matrix sq(m * m);
    multiply(half, half, sq, m);
    int eq = 2 * ev;
    if (n % 2 == 0)
    {
        v = sq;
        ev = eq;
    }
    else
    {
        multiply(h, sq, v, m);
        ev = eh + eq;
    }
    if (v[(m / 2) * m + m / 2] > 1e140)
    {
        for (auto& x : v)
            x *= 1e-140;
        ev += 140;
    }
}

}  // namespace

double kolmogorov_cdf(std::size_t n, double d)
{
    if (n == 0)
        throw std::invalid_argument("kolmogorov_cdf: n must be positive");
    const double nd = static_cast<double>(n) * d;
    if (d >= 1.0)
        return 1.0;
    if (nd <= 0.5)
        return 0.0;
    const double s2 = d * d * static_cast<double>(n);
    if (s2 > 7.24 || (s2 > 3.76 && n > 99))
    {
        const double dn = static_cast<double>(n);
        return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(dn) + 1.409 / dn) * s2);
    }

    const auto k = static_cast<std::size_t>(nd) + 1;
    const std::size_t m = 2 * k - 1;
    const double h = static_cast<double>(k) - nd;
    Matrix H(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            H[i * m + j] = (i + 1 >= j) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        H[i * m] -= std::pow(h, static_cast<double>(i + 1));
        H[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
    }
    if (2.0 * h - 1.0 > 0.0)
        H[(m - 1) * m] += std::pow(2.0 * h - 1.0, static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i + 1 > j)
                for (std::size_t g = 1; g <= i + 1 - j; ++g)
                    H[i * m + j] /= static_cast<double>(g);

    Matrix Q(m * m);
    int eq = 0;
    matrix_power(H, 0, Q, eq, m, n);
    double s = Q[(k - 1) * m + (k - 1)];
    for (std::size_t i = 1; i <= n; ++i)
    {
        s = s * static_cast<double>(i) / static_cast<double>(n);
        if (s < 1e-140)
        {
            s *= 1e140;
            eq -= 140;
        }
    }
    return std::clamp(s * std::pow(10.0, eq), 0.0, 1.0);
}

double ks_statistic_exp1(std::vector<double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("ks_statistic_exp1: no samples");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        const double f = samples[i] > 0.0 ? -std::expm1(-samples[i]) : 0.0;
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

std::optional<double> KsReport::pass_rate() const
{
    if (tested == 0)
        return std::nullopt;
    return static_cast<double>(passed) / static_cast<double>(tested);
}

KsReport nhpp_ks_test(std::span<const double> arrival_times,
                      double interval_length,
                      double horizon,
                      std::size_t n_min,
                      double level)
{
    if (!(interval_length > 0.0))
        throw std::invalid_argument("nhpp_ks_test: interval length must be positive");
    std::vector<double> times(arrival_times.begin(), arrival_times.end());
    std::sort(times.begin(), times.end());

    KsReport report;
    report.interval_length = interval_length;
    const auto count = static_cast<std::size_t>(std::ceil(horizon / interval_length));
    auto it = times.begin();
    for (std::size_t k = 0; k < count; ++k)
    {
        KsInterval iv;
        iv.start = static_cast<double>(k) * interval_length;
        const double end = std::min(iv.start + interval_length, horizon);
        const double len = end - iv.start;
        it = std::lower_bound(it, times.end(), iv.start);
        const auto stop = std::lower_bound(it, times.end(), end);
        iv.arrivals = static_cast<std::size_t>(stop - it);
        if (iv.arrivals >= n_min && len > 0.0)
        {
            const std::size_t n = iv.arrivals;
            std::vector<double> r(n);
            double prev = 0.0;
            for (std::size_t j = 1; j <= n; ++j)
            {
                const double tj = *(it + static_cast<std::ptrdiff_t>(j - 1)) - iv.start;
                r[j - 1] = static_cast<double>(n + 1 - j) * -std::log((len - tj) / (len - prev));
                prev = tj;
            }
            iv.tested = true;
            iv.statistic = ks_statistic_exp1(std::move(r));
            iv.p_value = 1.0 - kolmogorov_cdf(n, iv.statistic);
            iv.pass = iv.p_value > level;
            ++report.tested;
            report.passed += iv.pass;
        }
        else
        {
            ++report.skipped;
        }
        it = stop;
        report.intervals.push_back(iv);
    }
    return report;
}

}  // namespace cloudcap
