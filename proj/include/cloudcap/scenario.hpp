// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cloudcap/distributions.hpp"
#include "cloudcap/rate_function.hpp"

namespace cloudcap {

/// Integer units per resource type, indexed like Scenario::resources.
class ResourceVector
{
  public:
    ResourceVector() = default;
    explicit ResourceVector(std::size_t n, std::int64_t fill = 0) : units_(n, fill) {}
    ResourceVector(std::initializer_list<std::int64_t> units) : units_(units) {}

    std::size_t size() const { return units_.size(); }
    std::int64_t& operator[](std::size_t n) { return units_[n]; }
    std::int64_t operator[](std::size_t n) const { return units_[n]; }

    ResourceVector& operator+=(const ResourceVector& other);
    ResourceVector& operator-=(const ResourceVector& other);

    /// Componentwise this + extra <= limit.
    bool fits_with(const ResourceVector& extra, const ResourceVector& limit) const;

    const std::vector<std::int64_t>& units() const { return units_; }
    bool operator==(const ResourceVector&) const = default;

  private:
    std::vector<std::int64_t> units_;
};

struct Sla
{
    double tau_minutes = 0.0;
    double alpha = 0.01;

    /// Percentile level 1 - alpha used for staffing.
    double gamma() const { return 1.0 - alpha; }
    bool operator==(const Sla&) const = default;
};

struct JobClassSpec
{
    int class_id = 0;
    std::string name;
    bool is_loss_class = false;
    RateFunction rate;
    DiscretePmf batch_size;
    ServiceDistribution service;
    /// One pmf per resource, same order as Scenario::resources.
    std::vector<DiscretePmf> requirements;
    Sla sla;

    bool operator==(const JobClassSpec&) const = default;
};

struct Scenario
{
    std::string name;
    std::vector<std::string> resources;
    std::optional<std::size_t> dominant;
    double epsilon = 0.01;
    double horizon_minutes = 1440.0;
    double warmup_minutes = 0.0;
    std::uint64_t seed = 1;
    std::vector<JobClassSpec> classes;

    std::size_t dominant_index() const;
    std::size_t resource_index(std::string_view resource) const;
    std::size_t minutes() const;
    const JobClassSpec& job_class(int class_id) const;

    /// Every class rate multiplied by factor.
    Scenario scaled(double factor) const;

    bool operator==(const Scenario&) const = default;
};

class ScenarioError : public std::runtime_error
{
  public:
    explicit ScenarioError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/// Every invariant violation found; empty means the scenario is valid.
std::vector<std::string> validate(const Scenario& scenario);

/// Returns the scenario unchanged or throws ScenarioError.
Scenario checked(Scenario scenario);

/// Names accepted by builtin_preset.
std::vector<std::string> preset_names();

/// "near_stationary" or "time_varying"; throws std::invalid_argument.
Scenario builtin_preset(std::string_view name);

/// Key-value scenario text; see README for the schema. Throws ScenarioError
/// on syntax errors. The result is not validated.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

}  // namespace cloudcap
