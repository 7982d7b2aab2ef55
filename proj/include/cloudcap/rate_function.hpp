// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

namespace cloudcap {

/// Half-open interval [start, end) in minutes.
struct Interval
{
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool operator==(const Interval&) const = default;
};

/**
 * Polynomial batch-arrival intensity in batches/minute.
 *
 * The polynomial is evaluated in local time: if a period is set, local time
 * is t mod period, otherwise it is t itself. Outside the optional active
 * window the rate is exactly zero, and negative polynomial values clamp to
 * zero. The rate is zero for t < 0. Coefficients are in ascending powers of
 * t (minutes).
 */
class RateFunction
{
  public:
    RateFunction() = default;
    explicit RateFunction(std::vector<double> coeffs,
                          std::optional<Interval> window = std::nullopt,
                          std::optional<double> period = std::nullopt);

    static RateFunction constant(double rate);

    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::optional<Interval>& window() const { return window_; }
    const std::optional<double>& period() const { return period_; }

    /// Raw polynomial value at local time (no clamp, no window).
    double polynomial(double local_t) const;

    /// Clamped, windowed rate at absolute time t.
    double operator()(double t) const;

    /// Exact integral of the clamped rate over [t0, t1].
    double integral(double t0, double t1) const;

    /// Upper bound of the clamped rate over [t0, t1] from the polynomial's
    /// critical points; exact up to root-finding tolerance.
    double max_on(double t0, double t1) const;

    /// Maximal sub-intervals of [t0, t1] on which the rate is positive.
    std::vector<Interval> active_intervals(double t0, double t1) const;

    /// Every coefficient multiplied by factor.
    RateFunction scaled(double factor) const;

    bool is_zero() const;

    bool operator==(const RateFunction& other) const
    {
        return coeffs_ == other.coeffs_ && window_ == other.window_ && period_ == other.period_;
    }

  private:
    // Positive segments within one period (or within [lo, hi] when aperiodic),
    // expressed in local time.
    std::vector<Interval> local_active(double lo, double hi) const;
    double local_integral(double a, double b) const;

    std::vector<double> coeffs_;
    std::vector<double> antiderivative_;
    std::optional<Interval> window_;
    std::optional<double> period_;
    std::vector<Interval> period_segments_;  // cached when periodic
};

/// Clamped evaluation; identical to rate(t).
inline double rate_at(const RateFunction& rate, double t) { return rate(t); }

/// Expected batch count over [t0, t1].
inline double integrate_rate(const RateFunction& rate, double t0, double t1)
{
    return rate.integral(t0, t1);
}

namespace poly {

double evaluate(const std::vector<double>& coeffs, double x);
std::vector<double> derivative(const std::vector<double>& coeffs);
std::vector<double> antiderivative(const std::vector<double>& coeffs);

/// Sorted real roots of the polynomial strictly inside (a, b) where the sign
/// changes. Critical points split the interval into monotone pieces that are
/// bracketed and bisected.
std::vector<double> sign_changes(const std::vector<double>& coeffs, double a, double b);

/// Interior extrema: points in (a, b) where the derivative changes sign.
std::vector<double> critical_points(const std::vector<double>& coeffs, double a, double b);

}  // namespace poly
}  // namespace cloudcap
