// SPDX-License-Identifier: Apache-2.0
#include "cloudcap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cloudcap {

ResourceVector& ResourceVector::operator+=(const ResourceVector& other)
{
    for (std::size_t n = 0; n < units_.size(); ++n)
        units_[n] += other.units_[n];
    return *this;
}

ResourceVector& ResourceVector::operator-=(const ResourceVector& other)
{
    for (std::size_t n = 0; n < units_.size(); ++n)
        units_[n] -= other.units_[n];
    return *this;
}

bool ResourceVector::fits_with(const ResourceVector& extra, const ResourceVector& limit) const
{
    for (std::size_t n = 0; n < units_.size(); ++n)
        if (units_[n] + extra.units_[n] > limit.units_[n])
            return false;
    return true;
}

std::size_t Scenario::dominant_index() const
{
    if (!dominant)
        throw std::logic_error("scenario has no dominant resource");
    return *dominant;
}

std::size_t Scenario::resource_index(std::string_view resource) const
{
    auto it = std::find(resources.begin(), resources.end(), resource);
    if (it == resources.end())
        throw std::invalid_argument("unknown resource '" + std::string(resource) + "'");
    return static_cast<std::size_t>(it - resources.begin());
}

std::size_t Scenario::minutes() const
{
    return static_cast<std::size_t>(std::ceil(horizon_minutes));
}

const JobClassSpec& Scenario::job_class(int class_id) const
{
    for (const auto& c : classes)
        if (c.class_id == class_id)
            return c;
    throw std::invalid_argument("unknown class " + std::to_string(class_id));
}

Scenario Scenario::scaled(double factor) const
{
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("scale factor must be positive");
    Scenario out = *this;
    for (auto& c : out.classes)
        c.rate = c.rate.scaled(factor);
    return out;
}

namespace {

std::string join(const std::vector<std::string>& items)
{
    std::ostringstream os;
    for (std::size_t k = 0; k < items.size(); ++k)
        os << (k ? "; " : "") << items[k];
    return os.str();
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> violations)
    : std::runtime_error("invalid scenario: " + join(violations)), violations_(std::move(violations))
{
}

std::vector<std::string> validate(const Scenario& s)
{
    std::vector<std::string> errors;
    auto fail = [&](std::string msg) { errors.push_back(std::move(msg)); };

    if (s.resources.empty())
        fail("no resources declared");
    std::set<std::string> names(s.resources.begin(), s.resources.end());
    if (names.size() != s.resources.size())
        fail("duplicate resource names");
    if (!s.dominant)
        fail("missing dominant resource");
    else if (*s.dominant >= s.resources.size())
        fail("dominant resource index out of range");

    if (!(s.horizon_minutes > 0.0) || !std::isfinite(s.horizon_minutes))
        fail("horizon must be positive");
    if (!(s.warmup_minutes >= 0.0) || !std::isfinite(s.warmup_minutes))
        fail("warmup must be non-negative");
    if (!(s.epsilon > 0.0 && s.epsilon < 1.0))
        fail("epsilon out of range (0, 1)");

    if (s.classes.empty())
        fail("no job classes declared");
    int loss_classes = 0;
    for (std::size_t k = 0; k < s.classes.size(); ++k)
    {
        const auto& c = s.classes[k];
        const std::string tag = "class " + std::to_string(c.class_id) + ": ";
        if (c.class_id != static_cast<int>(k))
            fail(tag + "class ids must be 0..I in order");
        if (c.is_loss_class)
        {
            ++loss_classes;
            if (c.class_id != 0)
                fail(tag + "only class 0 may be a loss class");
            if (c.sla.tau_minutes != 0.0)
                fail(tag + "loss class must have tau = 0");
        }
        if (!(c.sla.alpha > 0.0 && c.sla.alpha < 1.0))
            fail(tag + "alpha out of range");
        if (!(c.sla.tau_minutes >= 0.0) || !std::isfinite(c.sla.tau_minutes))
            fail(tag + "tau must be non-negative");
        if (c.batch_size.empty())
            fail(tag + "missing batch size distribution");
        else if (c.batch_size.min_value() < 1)
            fail(tag + "batch size support must be >= 1");
        else if (!std::isfinite(c.batch_size.variance()))
            fail(tag + "batch size moments must be finite");
        if (!std::isfinite(c.service.mean()) || !(c.service.mean() > 0.0))
            fail(tag + "service mean must be finite and positive");
        if (c.requirements.size() != s.resources.size())
        {
            fail(tag + "requirement pmf count does not match resources");
        }
        else
        {
            for (std::size_t n = 0; n < c.requirements.size(); ++n)
            {
                const auto& r = c.requirements[n];
                if (r.empty())
                    fail(tag + "missing requirement pmf for " + s.resources[n]);
                else if (r.min_value() < 1)
                    fail(tag + "requirement support for " + s.resources[n] + " contains values < 1");
            }
        }
        for (double coeff : c.rate.coefficients())
            if (!std::isfinite(coeff))
                fail(tag + "rate coefficients must be finite");
    }
    if (!s.classes.empty())
    {
        if (loss_classes != 1)
            fail("exactly one loss class (class 0) is required");
        else if (!s.classes.front().is_loss_class)
            fail("class 0 must be the loss class");
    }
    return errors;
}

Scenario checked(Scenario scenario)
{
    auto errors = validate(scenario);
    if (!errors.empty())
        throw ScenarioError(std::move(errors));
    return scenario;
}

}  // namespace cloudcap
