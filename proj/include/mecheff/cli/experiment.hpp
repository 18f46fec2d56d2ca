#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mecheff/cli/dist_spec.hpp"
#include "mecheff/simulate.hpp"

namespace mecheff::cli {

enum class ExperimentKind { reserve, gainloss, bounds, thm1, thm2, thm3, regular_cx, ratio, bk };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view experiment_name(ExperimentKind kind);

/// "7", "1..100" or "1,2,5,10". Result is nonempty and every entry >= 1.
std::vector<int> parse_int_range(std::string_view text);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::bounds;
    /// Tagged record; when absent each experiment picks its own default.
    std::optional<nlohmann::json> distribution;
    std::vector<int> ks{1};
    int t = 1;
    /// nullopt means "auto": upper_bound_m(k) for thm1/thm3/gainloss, lower_bound_m(k) for thm2.
    std::optional<int> m;
    std::int64_t n_trials = 1'000'000;
    std::uint64_t seed = 1;
    std::string output_path;
    double epsilon_slack = 0.1;

    /// Read fields from a JSON config file body. Unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ExperimentReport {
    std::string csv;
    nlohmann::json summary;
    bool pass = true;
};

/// Header row of the CSV each experiment emits. Column order is stable.
std::string_view csv_header(ExperimentKind kind);

ExperimentReport run_experiment(const ExperimentConfig& config, SimOptions opts = {});

}  // namespace mecheff::cli
