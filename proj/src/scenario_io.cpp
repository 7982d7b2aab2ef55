// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cloudcap/scenario.hpp"

namespace cloudcap {
namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text, const std::string& key)
{
    try
    {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    }
    catch (const std::exception&)
    {
        throw ScenarioError({key + ": expected a number, got '" + text + "'"});
    }
}

std::int64_t to_int(const std::string& text, const std::string& key)
{
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ScenarioError({key + ": expected an integer, got '" + text + "'"});
    return v;
}

bool to_bool(const std::string& text, const std::string& key)
{
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ScenarioError({key + ": expected true/false, got '" + text + "'"});
}

std::vector<std::string> split_list(const std::string& text, char open, char close, const std::string& key)
{
    if (text.size() < 2 || text.front() != open || text.back() != close)
        throw ScenarioError({key + ": expected " + std::string(1, open) + "..." + std::string(1, close)});
    std::vector<std::string> items;
    std::string inner = text.substr(1, text.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            items.push_back(item);
    }
    return items;
}

std::vector<double> to_double_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    for (const auto& item : split_list(text, '[', ']', key))
        out.push_back(to_double(item, key));
    return out;
}

DiscretePmf to_pmf(const std::string& text, const std::string& key)
{
    std::vector<std::int64_t> values;
    std::vector<double> probs;
    for (const auto& item : split_list(text, '{', '}', key))
    {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ScenarioError({key + ": pmf entries must be value: probability"});
        values.push_back(to_int(trim(item.substr(0, colon)), key));
        probs.push_back(to_double(trim(item.substr(colon + 1)), key));
    }
    try
    {
        return DiscretePmf(std::move(values), std::move(probs));
    }
    catch (const std::invalid_argument& e)
    {
        throw ScenarioError({key + ": " + e.what()});
    }
}

std::vector<double> read_samples_file(const std::filesystem::path& path, const std::string& key)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError({key + ": cannot open samples file " + path.string()});
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line))
    {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        auto comma = line.find(',');
        if (comma != std::string::npos)
            line = trim(line.substr(0, comma));
        try
        {
            out.push_back(std::stod(line));
        }
        catch (const std::exception&)
        {
            // header row
        }
    }
    return out;
}

struct ClassDraft
{
    std::map<std::string, std::string> keys;
};

JobClassSpec build_class(int id,
                         const ClassDraft& draft,
                         const std::vector<std::string>& resources,
                         const std::filesystem::path& base_dir,
                         std::vector<std::string>& errors)
{
    JobClassSpec c;
    c.class_id = id;
    const std::string tag = "class " + std::to_string(id) + ".";
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = draft.keys.find(k);
        return it == draft.keys.end() ? nullptr : &it->second;
    };

    try
    {
        if (auto v = get("name"))
            c.name = *v;
        if (auto v = get("loss"))
            c.is_loss_class = to_bool(*v, tag + "loss");
        if (auto v = get("tau_minutes"))
            c.sla.tau_minutes = to_double(*v, tag + "tau_minutes");
        if (auto v = get("alpha"))
            c.sla.alpha = to_double(*v, tag + "alpha");

        std::vector<double> coeffs;
        std::optional<Interval> window;
        std::optional<double> period;
        if (auto v = get("rate.coeffs"))
            coeffs = to_double_list(*v, tag + "rate.coeffs");
        else
            errors.push_back(tag + "rate.coeffs missing");
        if (auto v = get("rate.window"))
        {
            auto w = to_double_list(*v, tag + "rate.window");
            if (w.size() != 2)
                throw ScenarioError({tag + "rate.window needs [start, end]"});
            window = Interval{w[0], w[1]};
        }
        if (auto v = get("rate.period"))
            period = to_double(*v, tag + "rate.period");
        try
        {
            c.rate = RateFunction(coeffs, window, period);
        }
        catch (const std::invalid_argument& e)
        {
            errors.push_back(tag + "rate: " + e.what());
        }

        if (auto v = get("batch.pmf"))
            c.batch_size = to_pmf(*v, tag + "batch.pmf");
        else if (auto g = get("batch.geometric_mean"))
            c.batch_size = DiscretePmf::geometric_with_mean(to_double(*g, tag + "batch.geometric_mean"));
        else
            c.batch_size = DiscretePmf::degenerate(1);

        std::optional<double> truncate;
        if (auto v = get("service.truncate_minutes"))
            truncate = to_double(*v, tag + "service.truncate_minutes");
        const std::string kind = get("service.kind") ? *get("service.kind") : "exponential";
        auto need = [&](const std::string& k) {
            auto v = get(k);
            if (!v)
                throw ScenarioError({tag + k + " missing"});
            return to_double(*v, tag + k);
        };
        try
        {
            if (kind == "exponential")
                c.service = ServiceDistribution(ExponentialService{need("service.mean")}, truncate);
            else if (kind == "lognormal")
                c.service = ServiceDistribution(LognormalService{need("service.mean"), need("service.std")},
                                                truncate);
            else if (kind == "empirical")
            {
                std::vector<double> samples;
                if (auto v = get("service.samples"))
                    samples = to_double_list(*v, tag + "service.samples");
                else if (auto f = get("service.samples_file"))
                {
                    std::filesystem::path p(*f);
                    if (p.is_relative())
                        p = base_dir / p;
                    samples = read_samples_file(p, tag + "service.samples_file");
                }
                c.service = ServiceDistribution(EmpiricalService{std::move(samples)}, truncate);
            }
            else
                errors.push_back(tag + "service.kind must be exponential, lognormal or empirical");
        }
        catch (const std::invalid_argument& e)
        {
            errors.push_back(tag + "service: " + e.what());
        }

        for (const auto& r : resources)
        {
            if (auto v = get("req." + r + ".pmf"))
                c.requirements.push_back(to_pmf(*v, tag + "req." + r + ".pmf"));
            else
            {
                errors.push_back(tag + "req." + r + ".pmf missing");
                c.requirements.emplace_back();
            }
        }
        for (const auto& [k, v] : draft.keys)
        {
            if (k.rfind("req.", 0) == 0)
            {
                auto res = k.substr(4, k.size() - 4 - 4);
                if (k.size() < 9 || k.substr(k.size() - 4) != ".pmf"
                    || std::find(resources.begin(), resources.end(), res) == resources.end())
                    errors.push_back(tag + k + ": unknown resource key");
            }
        }
    }
    catch (const ScenarioError& e)
    {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }
    return c;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs)
{
    std::string out = "[";
    for (std::size_t k = 0; k < xs.size(); ++k)
        out += (k ? ", " : "") + fmt(xs[k]);
    return out + "]";
}

std::string fmt_pmf(const DiscretePmf& pmf)
{
    std::string out = "{";
    for (std::size_t k = 0; k < pmf.values().size(); ++k)
        out += (k ? ", " : "") + std::to_string(pmf.values()[k]) + ": " + fmt(pmf.probabilities()[k]);
    return out + "}";
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
    Scenario s;
    std::vector<std::string> errors;
    std::map<std::string, std::string> global;
    std::map<int, ClassDraft> drafts;
    ClassDraft* current = nullptr;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[' && line.back() == ']')
        {
            std::string header = trim(line.substr(1, line.size() - 2));
            if (header.rfind("class", 0) != 0)
            {
                errors.push_back("line " + std::to_string(line_no) + ": unknown section [" + header + "]");
                current = nullptr;
                continue;
            }
            std::string id_text = trim(header.substr(5));
            if (!id_text.empty() && (id_text[0] == '.' || id_text[0] == ' '))
                id_text = trim(id_text.substr(1));
            try
            {
                current = &drafts[static_cast<int>(to_int(id_text, "section"))];
            }
            catch (const ScenarioError&)
            {
                errors.push_back("line " + std::to_string(line_no) + ": bad class section [" + header + "]");
                current = nullptr;
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (current)
            current->keys[key] = value;
        else
            global[key] = value;
    }

    try
    {
        for (const auto& [k, v] : global)
        {
            if (k == "name")
                s.name = v;
            else if (k == "horizon_minutes")
                s.horizon_minutes = to_double(v, k);
            else if (k == "warmup_minutes")
                s.warmup_minutes = to_double(v, k);
            else if (k == "epsilon")
                s.epsilon = to_double(v, k);
            else if (k == "seed")
                s.seed = static_cast<std::uint64_t>(to_int(v, k));
            else if (k == "resources")
                s.resources = split_list(v, '[', ']', k);
            else if (k == "dominant")
                ;
            else
                errors.push_back("unknown key '" + k + "'");
        }
        if (auto it = global.find("dominant"); it != global.end())
        {
            auto pos = std::find(s.resources.begin(), s.resources.end(), it->second);
            if (pos == s.resources.end())
                errors.push_back("dominant resource '" + it->second + "' is not declared");
            else
                s.dominant = static_cast<std::size_t>(pos - s.resources.begin());
        }
    }
    catch (const ScenarioError& e)
    {
        errors.insert(errors.end(), e.violations().begin(), e.violations().end());
    }

    for (const auto& [id, draft] : drafts)
        s.classes.push_back(build_class(id, draft, s.resources, base_dir, errors));

    if (!errors.empty())
        throw ScenarioError(std::move(errors));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

std::string serialize_scenario(const Scenario& s)
{
    std::ostringstream os;
    if (!s.name.empty())
        os << "name = " << s.name << "\n";
    os << "horizon_minutes = " << fmt(s.horizon_minutes) << "\n";
    os << "warmup_minutes = " << fmt(s.warmup_minutes) << "\n";
    os << "epsilon = " << fmt(s.epsilon) << "\n";
    os << "seed = " << s.seed << "\n";
    os << "resources = [";
    for (std::size_t n = 0; n < s.resources.size(); ++n)
        os << (n ? ", " : "") << s.resources[n];
    os << "]\n";
    if (s.dominant && *s.dominant < s.resources.size())
        os << "dominant = " << s.resources[*s.dominant] << "\n";

    for (const auto& c : s.classes)
    {
        os << "\n[class " << c.class_id << "]\n";
        if (!c.name.empty())
            os << "name = " << c.name << "\n";
        os << "loss = " << (c.is_loss_class ? "true" : "false") << "\n";
        os << "tau_minutes = " << fmt(c.sla.tau_minutes) << "\n";
        os << "alpha = " << fmt(c.sla.alpha) << "\n";
        os << "rate.coeffs = " << fmt_list(c.rate.coefficients()) << "\n";
        if (c.rate.window())
            os << "rate.window = " << fmt_list({c.rate.window()->start, c.rate.window()->end}) << "\n";
        if (c.rate.period())
            os << "rate.period = " << fmt(*c.rate.period()) << "\n";
        os << "batch.pmf = " << fmt_pmf(c.batch_size) << "\n";
        os << "service.kind = " << c.service.kind_name() << "\n";
        if (const auto* e = std::get_if<ExponentialService>(&c.service.kind()))
            os << "service.mean = " << fmt(e->mean) << "\n";
        else if (const auto* l = std::get_if<LognormalService>(&c.service.kind()))
            os << "service.mean = " << fmt(l->mean) << "\nservice.std = " << fmt(l->stddev) << "\n";
        else if (const auto* em = std::get_if<EmpiricalService>(&c.service.kind()))
            os << "service.samples = " << fmt_list(em->samples) << "\n";
        if (c.service.truncation())
            os << "service.truncate_minutes = " << fmt(*c.service.truncation()) << "\n";
        for (std::size_t n = 0; n < c.requirements.size() && n < s.resources.size(); ++n)
            if (!c.requirements[n].empty())
                os << "req." << s.resources[n] << ".pmf = " << fmt_pmf(c.requirements[n]) << "\n";
    }
    return os.str();
}

}  // namespace cloudcap
