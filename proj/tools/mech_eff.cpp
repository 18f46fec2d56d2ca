// mech-eff: run the efficiency/revenue experiments and write CSV + JSON reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mecheff/cli/experiment.hpp"

namespace {

using mecheff::cli::ConfigError;
using mecheff::cli::ExperimentConfig;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

unsigned threads_from_env()
{
    const char* v = std::getenv("MECH_EFF_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    try {
        const long n = std::stol(v);
        if (n < 1) throw ConfigError("MECH_EFF_THREADS must be a positive integer");
        return static_cast<unsigned>(n);
    } catch (const std::logic_error&) {
        throw ConfigError("MECH_EFF_THREADS must be a positive integer");
    }
}

std::string summary_path(const std::string& csv_path)
{
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
    return csv_path + ".json";
}

void write_file(const std::string& path, const std::string& body)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << body;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Revenue-optimal vs efficiency-optimal auction experiments"};
    std::string experiment;
    std::optional<std::string> config_path, dist, k, m, output;
    std::optional<int> t;
    std::optional<std::int64_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps_slack;

    app.add_option("experiment", experiment,
                   "reserve | gainloss | bounds | thm1 | thm2 | thm3 | regular_cx | ratio | bk");
    app.add_option("--config", config_path, "JSON config file; flags override its fields");
    app.add_option("--dist", dist, "distribution, e.g. exponential:1, uniform:0:1, g:alpha:1:1e-6, p:0.1:1");
    app.add_option("--k", k, "bidder count: 5, 1..100 or 1,2,5");
    app.add_option("--t", t, "number of identical items");
    app.add_option("--m", m, "extra bidders, or 'auto'");
    app.add_option("--n", n, "Monte Carlo trials");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--output", output, "CSV path; the JSON summary goes next to it");
    app.add_option("--eps-slack", eps_slack, "slack epsilon for the multi-item bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    mecheff::cli::ExperimentReport report;
    ExperimentConfig cfg;
    try {
        if (config_path) {
            std::ifstream f(*config_path);
            if (!f) throw ConfigError("cannot read config '" + *config_path + "'");
            nlohmann::json j;
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("bad config JSON: ") + e.what());
            }
            cfg = ExperimentConfig::from_json(j);
        }
        if (!experiment.empty()) cfg.experiment = mecheff::cli::parse_experiment_kind(experiment);
        else if (!config_path) throw ConfigError("an experiment name is required");
        if (dist) cfg.distribution = mecheff::cli::distribution_record(*dist);
        if (k) cfg.ks = mecheff::cli::parse_int_range(*k);
        if (t) cfg.t = *t;
        if (m) {
            if (*m == "auto") {
                cfg.m.reset();
            } else {
                try {
                    cfg.m = std::stoi(*m);
                } catch (const std::logic_error&) {
                    throw ConfigError("--m must be an integer or 'auto'");
                }
                if (*cfg.m < 0) throw ConfigError("--m must be nonnegative");
            }
        }
        if (n) cfg.n_trials = *n;
        if (seed) cfg.seed = *seed;
        if (output) cfg.output_path = *output;
        if (eps_slack) cfg.epsilon_slack = *eps_slack;

        mecheff::SimOptions opts;
        opts.threads = threads_from_env();
        report = mecheff::cli::run_experiment(cfg, opts);
    } catch (const mecheff::cli::ConfigError& e) {
        std::cerr << "mech-eff: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mecheff::NoRoot& e) {
        std::cerr << "mech-eff: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mecheff::DomainError& e) {
        std::cerr << "mech-eff: " << e.what() << '\n';
        return kExitConfig;
    }

    const std::string summary = report.summary.dump(2) + "\n";
    try {
        if (cfg.output_path.empty()) {
            std::cout << report.csv;
            std::cerr << summary;
        } else {
            write_file(cfg.output_path, report.csv);
            write_file(summary_path(cfg.output_path), summary);
        }
    } catch (const ConfigError& e) {
        std::cerr << "mech-eff: " << e.what() << '\n';
        return kExitConfig;
    }
    return report.pass ? 0 : kExitFail;
}
