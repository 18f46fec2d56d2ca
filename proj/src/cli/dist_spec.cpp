#include "mecheff/cli/dist_spec.hpp"

#include <string>
#include <vector>

namespace mecheff::cli {

namespace {

using nlohmann::json;

double number_field(const json& spec, const char* key, std::optional<double> fallback = std::nullopt)
{
    if (!spec.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(std::string("distribution field '") + key + "' is required");
    }
    const auto& v = spec.at(key);
    if (v.is_string() && v.get<std::string>() == "alpha") return kAlpha;
    if (!v.is_number()) throw ConfigError(std::string("distribution field '") + key + "' must be a number");
    return v.get<double>();
}

double parse_number(const std::string& token)
{
    if (token == "alpha") return kAlpha;
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw ConfigError("bad number '" + token + "'");
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("bad number '" + token + "'");
    }
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

json shorthand_to_record(std::string_view text)
{
    const auto parts = split(text, ':');
    const std::string& family = parts.front();
    const auto arg = [&](std::size_t i) -> std::optional<double> {
        if (i < parts.size()) return parse_number(parts[i]);
        return std::nullopt;
    };
    const auto need = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() - 1 < lo || parts.size() - 1 > hi)
            throw ConfigError("wrong number of parameters in distribution '" + std::string(text) + "'");
    };
    if (family == "exponential") {
        need(0, 1);
        return {{"family", family}, {"rate", arg(1).value_or(1.0)}};
    }
    if (family == "uniform") {
        need(0, 2);
        if (parts.size() == 2) return {{"family", family}, {"lo", 0.0}, {"hi", *arg(1)}};
        return {{"family", family}, {"lo", arg(1).value_or(0.0)}, {"hi", arg(2).value_or(1.0)}};
    }
    if (family == "g") {
        need(2, 3);
        json rec{{"family", family}, {"phi", *arg(1)}, {"r", *arg(2)}};
        if (auto e = arg(3)) rec["eps"] = *e;
        return rec;
    }
    if (family == "p") {
        need(2, 2);
        return {{"family", family}, {"eps", *arg(1)}, {"r", *arg(2)}};
    }
    throw ConfigError("unknown distribution family '" + family + "'");
}

}  // namespace

DistributionPtr parse_distribution(const json& spec)
{
    if (!spec.is_object() || !spec.contains("family") || !spec.at("family").is_string())
        throw ConfigError("distribution must be an object with a string 'family'");
    const auto family = spec.at("family").get<std::string>();
    try {
        if (family == "exponential") return std::make_shared<Exponential>(number_field(spec, "rate", 1.0));
        if (family == "uniform")
            return std::make_shared<Uniform>(number_field(spec, "lo", 0.0), number_field(spec, "hi", 1.0));
        if (family == "g") {
            std::optional<double> eps;
            if (spec.contains("eps")) eps = number_field(spec, "eps");
            return std::make_shared<GFamily>(number_field(spec, "phi"), number_field(spec, "r"), eps);
        }
        if (family == "p") return std::make_shared<PFamily>(number_field(spec, "eps"), number_field(spec, "r"));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid distribution parameters: ") + e.what());
    }
    throw ConfigError("unknown distribution family '" + family + "'");
}

json distribution_record(std::string_view text)
{
    if (!text.empty() && text.front() == '{') {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("bad distribution JSON: ") + e.what());
        }
    }
    return shorthand_to_record(text);
}

DistributionPtr parse_distribution(std::string_view text) { return parse_distribution(distribution_record(text)); }

}  // namespace mecheff::cli
