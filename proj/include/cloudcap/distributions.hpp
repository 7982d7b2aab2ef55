// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace cloudcap {

using Rng = std::mt19937_64;

/// Finite discrete distribution over integer values.
class DiscretePmf
{
  public:
    DiscretePmf() = default;
    /// Probabilities are normalized; values need not be sorted.
    DiscretePmf(std::vector<std::int64_t> values, std::vector<double> probs);

    static DiscretePmf degenerate(std::int64_t value);

    /// Shifted geometric on {1, 2, ...} with the given mean, truncated where
    /// the remaining tail mass drops below 1e-12. Matches the mean only; the
    /// standard deviation follows from the geometric shape.
    static DiscretePmf geometric_with_mean(double mean);

    std::int64_t sample(Rng& rng) const;

    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double stddev() const;
    std::int64_t min_value() const;
    std::int64_t max_value() const;
    bool empty() const { return values_.empty(); }

    const std::vector<std::int64_t>& values() const { return values_; }
    const std::vector<double>& probabilities() const { return probs_; }

    bool operator==(const DiscretePmf& other) const
    {
        return values_ == other.values_ && probs_ == other.probs_;
    }

  private:
    std::vector<std::int64_t> values_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

struct ExponentialService
{
    double mean = 1.0;
    bool operator==(const ExponentialService&) const = default;
};

/// Lognormal parameterized by the mean and standard deviation of the
/// untruncated distribution.
struct LognormalService
{
    double mean = 1.0;
    double stddev = 1.0;

    double mu() const;
    double sigma() const;
    bool operator==(const LognormalService&) const = default;
};

/// Bootstrap over observed durations.
struct EmpiricalService
{
    std::vector<double> samples;
    bool operator==(const EmpiricalService&) const = default;
};

/**
 * Service-duration distribution in minutes with optional truncation.
 *
 * Draws above the cap are replaced by the cap. All moments and the survival
 * function refer to the truncated variable.
 */
class ServiceDistribution
{
  public:
    using Kind = std::variant<ExponentialService, LognormalService, EmpiricalService>;

    ServiceDistribution() = default;
    explicit ServiceDistribution(Kind kind, std::optional<double> truncate_minutes = std::nullopt);

    double sample(Rng& rng) const;

    /// E[min(S, cap)].
    double mean() const { return mean_; }

    /// P(min(S, cap) > x).
    double survival(double x) const;

    const Kind& kind() const { return kind_; }
    std::string kind_name() const;
    const std::optional<double>& truncation() const { return truncate_; }

    /// Truncated atoms of an empirical distribution; empty otherwise.
    std::vector<double> atoms() const;

    bool operator==(const ServiceDistribution& other) const
    {
        return kind_ == other.kind_ && truncate_ == other.truncate_;
    }

  private:
    double untruncated_sample(Rng& rng) const;
    double compute_mean() const;

    Kind kind_ = ExponentialService{};
    std::optional<double> truncate_;
    double mean_ = 1.0;
};

}  // namespace cloudcap
