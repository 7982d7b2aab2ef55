// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cloudcap/parallel.hpp"
#include "cloudcap/rng.hpp"
#include "cloudcap/scenario.hpp"

namespace cloudcap {

enum class LoadMode
{
    /// lambda(t) * E[S]
    pointwise,
    /// Integral of the arrivals still in service at t, with lambda = 0 before 0.
    exact,
};

/// Mean number of batches in an infinite-server system, m(t).
class OfferedLoad
{
  public:
    OfferedLoad() = default;
    OfferedLoad(RateFunction rate, ServiceDistribution service, LoadMode mode);

    double operator()(double t) const;
    double pointwise(double t) const;
    double exact(double t) const;

    const RateFunction& rate() const { return rate_; }
    const ServiceDistribution& service() const { return service_; }
    LoadMode mode() const { return mode_; }

  private:
    RateFunction rate_;
    ServiceDistribution service_;
    LoadMode mode_ = LoadMode::pointwise;
    std::vector<double> atoms_;
};

double offered_load_mean(const RateFunction& rate, const ServiceDistribution& service, double t, LoadMode mode);

/// First two moments of one class's offered load on one resource.
struct SolMoments
{
    int class_id = 0;
    std::size_t resource = 0;
    double batch_mean = 1.0;       // v
    double batch_variance = 0.0;   // beta^2
    double req_mean = 1.0;         // r
    double req_variance = 0.0;     // delta^2
    OfferedLoad load;

    double mean(double t) const { return mean_for_load(load(t)); }
    double variance(double t) const { return variance_for_load(load(t)); }

    double mean_for_load(double m) const { return batch_mean * req_mean * m; }
    double variance_for_load(double m) const
    {
        return m
               * (req_variance * batch_mean + req_mean * req_mean * batch_variance
                  + batch_mean * batch_mean * req_mean * req_mean);
    }

    /// v * r * lambda(t): resource units arriving per minute.
    double unit_arrival_rate(double t) const { return batch_mean * req_mean * load.rate()(t); }
};

SolMoments sol_moments(const JobClassSpec& spec, std::size_t resource, LoadMode mode = LoadMode::pointwise);

/// x0 - mean(0) + mean(t) + sqrt(t var(t)) Phi^-1(gamma).
double percentile_path(const SolMoments& moments, double x0, double gamma, double t);

/// x0 - mean(0) + mean(t) + sqrt(var(t)) W(t) on a grid starting at 0, with
/// independent N(0, dt) increments of W.
std::vector<double> diffusion_path(const SolMoments& moments, double x0, Rng& rng, std::span<const double> grid);

/// Drift and diffusion coefficient of one class evaluated on a grid once.
struct PathTable
{
    std::vector<double> base;   // x0 - mean(0) + mean(t)
    std::vector<double> scale;  // sqrt(var(t))
};

PathTable tabulate_path(const SolMoments& moments, double x0, std::span<const double> grid);

/// Adds one sampled path to out.
void add_diffusion_path(const PathTable& table, Rng& rng, std::span<const double> grid, std::span<double> out);

/// Linear interpolation of a path sampled on grid; clamps at the ends.
double interpolate(std::span<const double> grid, std::span<const double> values, double t);

/// Sum of independent per-class offered loads on one resource.
class AggregateSol
{
  public:
    /// initial[i] is X_i(0); an empty vector uses each class mean at 0.
    /// Throws std::invalid_argument when classes mix resources.
    AggregateSol(std::vector<SolMoments> parts, std::vector<double> initial = {});

    std::size_t resource() const { return resource_; }
    const std::vector<SolMoments>& parts() const { return parts_; }
    double initial(std::size_t k) const { return initial_[k]; }

    /// Sum over classes of X_i(0) - mean_i(0) + mean_i(t).
    double mean(double t) const;
    /// Sum over classes of t * var_i(t).
    double variance(double t) const;
    double percentile(double gamma, double t) const;
    /// Sum of v r lambda(t) over classes.
    double unit_arrival_rate(double t) const;

    /// Sum of independent per-class diffusion paths.
    std::vector<double> sample_path(Rng& rng, std::span<const double> grid) const;
    std::vector<PathTable> tabulate(std::span<const double> grid) const;

  private:
    std::vector<SolMoments> parts_;
    std::vector<double> initial_;
    std::size_t resource_ = 0;
};

AggregateSol aggregate_moments(std::vector<SolMoments> parts, std::vector<double> initial = {});

/// Dense row-major paths x minutes matrix.
class PathMatrix
{
  public:
    PathMatrix() = default;
    PathMatrix(std::size_t paths, std::size_t bins) : paths_(paths), bins_(bins), data_(paths * bins) {}

    std::size_t paths() const { return paths_; }
    std::size_t bins() const { return bins_; }
    std::span<double> row(std::size_t p) { return {data_.data() + p * bins_, bins_}; }
    std::span<const double> row(std::size_t p) const { return {data_.data() + p * bins_, bins_}; }
    double operator()(std::size_t p, std::size_t m) const { return data_[p * bins_ + m]; }
    double& operator()(std::size_t p, std::size_t m) { return data_[p * bins_ + m]; }

    bool operator==(const PathMatrix&) const = default;

  private:
    std::size_t paths_ = 0;
    std::size_t bins_ = 0;
    std::vector<double> data_;
};

/// Aggregate diffusion paths; path p draws from substream (seed, diffusion, 0, p)
/// so serial and parallel runs agree exactly.
PathMatrix diffusion_ensemble(const AggregateSol& sol,
                              std::size_t paths,
                              std::span<const double> grid,
                              std::uint64_t seed,
                              Execution exec = Execution::parallel);

/// 0, 1, ..., minutes - 1.
std::vector<double> minute_grid(std::size_t minutes);

}  // namespace cloudcap
