#pragma once

#include <cstdint>

#include "mecheff/distributions.hpp"

namespace mecheff {

/// Monte Carlo mean with its standard error and provenance.
struct Estimate {
    double mean = 0.0;
    double std_err = 0.0;  // sample std / sqrt(n)
    std::int64_t n = 0;
    std::uint64_t seed = 0;
};

/// Two estimates computed on common draws; diff = treatment - baseline.
struct PairedEstimate {
    double diff_mean = 0.0;
    double diff_std_err = 0.0;
    Estimate baseline;
    Estimate treatment;
};

struct MechanismEstimate {
    Estimate efficiency;
    Estimate revenue;
};

/// RMA(k) against EMA(k) on the same k bidders.
struct RatioEstimate {
    double efficiency_ratio = 0.0;     // Eff(RMA) / Eff(EMA)
    double efficiency_ratio_se = 0.0;  // delta method
    double revenue_ratio = 0.0;        // Rev(EMA) / Rev(RMA)
    double revenue_ratio_se = 0.0;
    Estimate eff_ema;
    Estimate eff_rma;
    Estimate rev_ema;
    Estimate rev_rma;
};

enum class Mechanism { EMA, RMA };

struct SimOptions {
    /// Worker threads; 0 means std::thread::hardware_concurrency(). Results do not depend on it.
    unsigned threads = 0;
};

/// Mean efficiency and revenue of one mechanism over n_trials draws of n_bidders values.
MechanismEstimate estimate_mechanism(const ValueDistribution& dist, int n_bidders, int t, Mechanism mechanism,
                                     std::int64_t n_trials, std::uint64_t seed, SimOptions opts = {});

/// Eff(RMA(k + extra)) - Eff(EMA(k)): the first k draws of each trial are shared.
PairedEstimate paired_compare(const ValueDistribution& dist, int k, int extra, int t, std::int64_t n_trials,
                              std::uint64_t seed, SimOptions opts = {});

/// Rev(EMA(k + 1)) - Rev(RMA(k)) for one item on common draws.
PairedEstimate revenue_compare_bk(const ValueDistribution& dist, int k, std::int64_t n_trials, std::uint64_t seed,
                                  SimOptions opts = {});

/// Efficiency and revenue ratios of the two single-item mechanisms with k bidders each.
RatioEstimate efficiency_ratio(const ValueDistribution& dist, int k, std::int64_t n_trials, std::uint64_t seed,
                               SimOptions opts = {});

}  // namespace mecheff
