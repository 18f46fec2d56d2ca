#include "mecheff/simulate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mecheff/auctions.hpp"
#include "mecheff/rng.hpp"

namespace mecheff {

namespace {

constexpr std::int64_t kBlockSize = 4096;

// Running means and co-moments for up to four observation channels.
template <std::size_t C>
struct Moments {
    std::int64_t n = 0;
    std::array<double, C> mean{};
    std::array<std::array<double, C>, C> co{};

    void add(const std::array<double, C>& v)
    {
        ++n;
        std::array<double, C> delta{};
        for (std::size_t i = 0; i < C; ++i) {
            delta[i] = v[i] - mean[i];
            mean[i] += delta[i] / static_cast<double>(n);
        }
        for (std::size_t i = 0; i < C; ++i)
            for (std::size_t j = 0; j < C; ++j) co[i][j] += delta[i] * (v[j] - mean[j]);
    }

    static Moments merge(const Moments& a, const Moments& b)
    {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        Moments out;
        out.n = a.n + b.n;
        const double na = static_cast<double>(a.n);
        const double nb = static_cast<double>(b.n);
        const double nt = static_cast<double>(out.n);
        std::array<double, C> d{};
        for (std::size_t i = 0; i < C; ++i) {
            d[i] = b.mean[i] - a.mean[i];
            out.mean[i] = a.mean[i] + d[i] * nb / nt;
        }
        for (std::size_t i = 0; i < C; ++i)
            for (std::size_t j = 0; j < C; ++j)
                out.co[i][j] = a.co[i][j] + b.co[i][j] + d[i] * d[j] * na * nb / nt;
        return out;
    }

    double cov(std::size_t i, std::size_t j) const
    {
        return n > 1 ? co[i][j] / static_cast<double>(n - 1) : 0.0;
    }

    double std_err(std::size_t i) const
    {
        return n > 1 ? std::sqrt(std::max(0.0, cov(i, i)) / static_cast<double>(n)) : 0.0;
    }

    Estimate estimate(std::size_t i, std::uint64_t seed) const { return {mean[i], std_err(i), n, seed}; }
};

// Merge block results pairwise in a fixed tree so the reduction order depends only on n_trials.
template <std::size_t C>
Moments<C> tree_reduce(std::vector<Moments<C>> parts)
{
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<Moments<C>> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(Moments<C>::merge(parts[i], parts[i + 1]));
        if (parts.size() % 2 == 1) next.push_back(parts.back());
        parts = std::move(next);
    }
    return parts.front();
}

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs trial(stream, draws, observation) for every trial index and returns the merged moments.
// Each worker owns its scratch buffer; trials are grouped in fixed-size blocks.
template <std::size_t C, class Trial>
Moments<C> run_trials(std::int64_t n_trials, std::uint64_t seed, SimOptions opts, Trial trial)
{
    if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
    const std::int64_t n_blocks = (n_trials + kBlockSize - 1) / kBlockSize;
    std::vector<Moments<C>> blocks(static_cast<std::size_t>(n_blocks));
    std::atomic<std::int64_t> next_block{0};

    auto worker = [&]() {
        std::vector<double> scratch;
        BidVector bids;
        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            Moments<C> m;
            const std::int64_t end = std::min(n_trials, (b + 1) * kBlockSize);
            for (std::int64_t i = b * kBlockSize; i < end; ++i) {
                TrialStream stream(seed, static_cast<std::uint64_t>(i));
                m.add(trial(stream, scratch, bids));
            }
            blocks[static_cast<std::size_t>(b)] = m;
        }
    };

    const auto n_workers = static_cast<std::int64_t>(resolve_threads(opts.threads));
    const auto spawn = std::min<std::int64_t>(n_workers, n_blocks) - 1;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, spawn)));
    for (std::int64_t i = 0; i < spawn; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return tree_reduce(std::move(blocks));
}

void draw_values(const ValueDistribution& dist, TrialStream& stream, std::vector<double>& out, int count)
{
    out.resize(static_cast<std::size_t>(count));
    for (double& v : out) v = sample(dist, stream.uniform());
}

void check_counts(int k, int t)
{
    if (k < 1) throw std::invalid_argument("bidder count must be at least 1");
    if (t < 1) throw std::invalid_argument("item supply t must be at least 1");
}

}  // namespace

MechanismEstimate estimate_mechanism(const ValueDistribution& dist, int n_bidders, int t, Mechanism mechanism,
                                     std::int64_t n_trials, std::uint64_t seed, SimOptions opts)
{
    check_counts(n_bidders, t);
    const double reserve = mechanism == Mechanism::RMA ? reserve_price(dist) : 0.0;
    const auto moments = run_trials<2>(n_trials, seed, opts,
                                       [&](TrialStream& s, std::vector<double>& v, BidVector& bids) {
                                           draw_values(dist, s, v, n_bidders);
                                           bids.assign(v);
                                           const auto out = mechanism == Mechanism::RMA ? rma(bids, t, reserve)
                                                                                        : ema(bids, t);
                                           return std::array<double, 2>{out.efficiency, out.revenue};
                                       });
    return {moments.estimate(0, seed), moments.estimate(1, seed)};
}

PairedEstimate paired_compare(const ValueDistribution& dist, int k, int extra, int t, std::int64_t n_trials,
                              std::uint64_t seed, SimOptions opts)
{
    check_counts(k, t);
    if (extra < 0) throw std::invalid_argument("extra bidder count must be nonnegative");
    const double reserve = reserve_price(dist);
    const auto moments = run_trials<2>(
        n_trials, seed, opts, [&](TrialStream& s, std::vector<double>& v, BidVector& bids) {
            draw_values(dist, s, v, k + extra);
            bids.assign(std::span<const double>(v).first(static_cast<std::size_t>(k)));
            const double eff_ema = ema(bids, t).efficiency;
            bids.assign(v);
            const double eff_rma = rma(bids, t, reserve).efficiency;
            return std::array<double, 2>{eff_ema, eff_rma};
        });

    PairedEstimate out;
    out.baseline = moments.estimate(0, seed);
    out.treatment = moments.estimate(1, seed);
    out.diff_mean = out.treatment.mean - out.baseline.mean;
    const double var = moments.cov(0, 0) + moments.cov(1, 1) - 2.0 * moments.cov(0, 1);
    out.diff_std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(moments.n));
    return out;
}

PairedEstimate revenue_compare_bk(const ValueDistribution& dist, int k, std::int64_t n_trials, std::uint64_t seed,
                                  SimOptions opts)
{
    check_counts(k, 1);
    const double reserve = reserve_price(dist);
    const auto moments = run_trials<2>(
        n_trials, seed, opts, [&](TrialStream& s, std::vector<double>& v, BidVector& bids) {
            draw_values(dist, s, v, k + 1);
            bids.assign(std::span<const double>(v).first(static_cast<std::size_t>(k)));
            const double rev_rma = rma(bids, 1, reserve).revenue;
            bids.assign(v);
            const double rev_ema = ema(bids, 1).revenue;
            return std::array<double, 2>{rev_rma, rev_ema};
        });

    PairedEstimate out;
    out.baseline = moments.estimate(0, seed);
    out.treatment = moments.estimate(1, seed);
    out.diff_mean = out.treatment.mean - out.baseline.mean;
    const double var = moments.cov(0, 0) + moments.cov(1, 1) - 2.0 * moments.cov(0, 1);
    out.diff_std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(moments.n));
    return out;
}

RatioEstimate efficiency_ratio(const ValueDistribution& dist, int k, std::int64_t n_trials, std::uint64_t seed,
                               SimOptions opts)
{
    check_counts(k, 1);
    const double reserve = reserve_price(dist);
    const auto moments = run_trials<4>(
        n_trials, seed, opts, [&](TrialStream& s, std::vector<double>& v, BidVector& bids) {
            draw_values(dist, s, v, k);
            bids.assign(v);
            const auto e = ema(bids, 1);
            const auto r = rma(bids, 1, reserve);
            return std::array<double, 4>{e.efficiency, r.efficiency, e.revenue, r.revenue};
        });

    // Delta method for mean(a) / mean(b): var(a - R b) / (n mean(b)^2).
    const auto ratio = [&](std::size_t a, std::size_t b, double& se) {
        const double den = moments.mean[b];
        if (den == 0.0) {
            se = 0.0;
            return 0.0;
        }
        const double R = moments.mean[a] / den;
        const double var = moments.cov(a, a) - 2.0 * R * moments.cov(a, b) + R * R * moments.cov(b, b);
        se = std::sqrt(std::max(0.0, var) / static_cast<double>(moments.n)) / std::abs(den);
        return R;
    };

    RatioEstimate out;
    out.efficiency_ratio = ratio(1, 0, out.efficiency_ratio_se);
    out.revenue_ratio = ratio(2, 3, out.revenue_ratio_se);
    out.eff_ema = moments.estimate(0, seed);
    out.eff_rma = moments.estimate(1, seed);
    out.rev_ema = moments.estimate(2, seed);
    out.rev_rma = moments.estimate(3, seed);
    return out;
}

}  // namespace mecheff
