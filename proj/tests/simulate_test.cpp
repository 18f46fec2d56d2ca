#include <doctest.h>

#include <cmath>
#include <cstring>
#include <thread>

#include "mecheff/analysis.hpp"
#include "mecheff/rng.hpp"
#include "mecheff/simulate.hpp"

using namespace mecheff;

namespace {

constexpr std::int64_t kN = 400'000;

// E[max of n draws] = integral of 1 - F^n over [0, hi], by fixed-panel Simpson.
double expected_max_oracle(const ValueDistribution& d, int n)
{
    const double hi = d.effective_hi();
    constexpr int panels = 200000;
    const double h = hi / panels;
    const auto f = [&](double x) { return 1.0 - std::pow(d.cdf(x), n); };
    double s = f(0.0) + f(hi);
    for (int i = 1; i < panels; ++i) s += f(h * i) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("counter-based streams depend only on (seed, trial)")
{
    TrialStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("estimate_mechanism against order-statistic means")
{
    const Uniform u(0.0, 1.0);
    const auto e2 = estimate_mechanism(u, 2, 1, Mechanism::EMA, kN, 1);
    CHECK(std::abs(e2.efficiency.mean - 2.0 / 3.0) <= 3.0 * e2.efficiency.std_err);
    CHECK(e2.efficiency.n == kN);
    CHECK(e2.efficiency.seed == 1);
    // Second-highest of two uniforms.
    CHECK(std::abs(e2.revenue.mean - 1.0 / 3.0) <= 4.0 * e2.revenue.std_err);

    const Exponential ex(1.0);
    for (int n : {1, 4}) {
        const auto est = estimate_mechanism(ex, n, 1, Mechanism::EMA, kN, 2);
        CHECK(std::abs(est.efficiency.mean - expected_max_oracle(ex, n)) <= 4.0 * est.efficiency.std_err);
    }
    CHECK(expected_max_oracle(ex, 4) == doctest::Approx(25.0 / 12.0).epsilon(1e-8));
    const auto u5 = estimate_mechanism(u, 5, 1, Mechanism::EMA, kN, 3);
    CHECK(std::abs(u5.efficiency.mean - expected_max_oracle(u, 5)) <= 4.0 * u5.efficiency.std_err);

    // One bidder facing reserve 1: efficiency is E[X; X >= 1] = 2/e, revenue is P(X >= 1) = 1/e.
    const auto r1 = estimate_mechanism(ex, 1, 1, Mechanism::RMA, kN, 4);
    CHECK(std::abs(r1.efficiency.mean - 2.0 / std::exp(1.0)) <= 4.0 * r1.efficiency.std_err);
    CHECK(std::abs(r1.revenue.mean - 1.0 / std::exp(1.0)) <= 4.0 * r1.revenue.std_err);
    const auto e1 = estimate_mechanism(ex, 1, 1, Mechanism::EMA, kN, 4);
    CHECK(r1.efficiency.mean <= e1.efficiency.mean);
}

TEST_CASE("single-trial determinism and zero standard error")
{
    const Exponential ex(1.0);
    const auto a = estimate_mechanism(ex, 3, 1, Mechanism::RMA, 1, 77);
    const auto b = estimate_mechanism(ex, 3, 1, Mechanism::RMA, 1, 77);
    CHECK(same_bits(a.efficiency.mean, b.efficiency.mean));
    CHECK(a.efficiency.std_err == 0.0);
    CHECK_THROWS(estimate_mechanism(ex, 3, 1, Mechanism::RMA, 0, 77));
}

TEST_CASE("results do not depend on the worker count")
{
    const GFamily g(kAlpha, 1.0);
    const auto ref = paired_compare(g, 4, 2, 1, 50'000, 9, SimOptions{1});
    for (unsigned th : {2u, 3u, 8u}) {
        const auto other = paired_compare(g, 4, 2, 1, 50'000, 9, SimOptions{th});
        CHECK(same_bits(ref.diff_mean, other.diff_mean));
        CHECK(same_bits(ref.diff_std_err, other.diff_std_err));
        CHECK(same_bits(ref.baseline.mean, other.baseline.mean));
    }
    const auto r1 = efficiency_ratio(g, 3, 30'000, 5, SimOptions{1});
    const auto r4 = efficiency_ratio(g, 3, 30'000, 5, SimOptions{4});
    CHECK(same_bits(r1.efficiency_ratio, r4.efficiency_ratio));
    CHECK(same_bits(r1.revenue_ratio_se, r4.revenue_ratio_se));
}

TEST_CASE("engine can be driven from several threads at once")
{
    const Exponential ex(1.0);
    PairedEstimate a, b;
    std::thread ta([&] { a = paired_compare(ex, 3, 2, 1, 40'000, 100, SimOptions{2}); });
    std::thread tb([&] { b = paired_compare(ex, 3, 2, 1, 40'000, 200, SimOptions{2}); });
    ta.join();
    tb.join();
    CHECK(same_bits(a.diff_mean, paired_compare(ex, 3, 2, 1, 40'000, 100).diff_mean));
    CHECK(same_bits(b.diff_mean, paired_compare(ex, 3, 2, 1, 40'000, 200).diff_mean));
}

TEST_CASE("paired_compare")
{
    // Nothing falls below the reserve of G with phi = 0, so the mechanisms coincide.
    const auto same = paired_compare(GFamily(0.0, 1.0), 4, 0, 1, 20'000, 1);
    CHECK(same.diff_mean == 0.0);
    CHECK(same.diff_std_err == 0.0);

    const auto lower = paired_compare(GFamily(kAlpha, 1.0, 1e-6), 5, lower_bound_m(5), 1, 1'000'000, 11);
    CHECK(lower.diff_mean < 0.0);
    CHECK(std::abs(lower.diff_mean) > 3.0 * lower.diff_std_err);
    // Matches the analytic gap -r q(alpha) up to O(eps) and noise.
    CHECK(std::abs(lower.diff_mean + q_poly(kAlpha, 5, lower_bound_m(5))) <= 4.0 * lower.diff_std_err + 1e-5);

    const auto upper = paired_compare(Exponential(1.0), 5, upper_bound_m(5), 1, kN, 12);
    CHECK(upper.diff_mean >= -3.0 * upper.diff_std_err);
    CHECK(upper.diff_mean == doctest::Approx(upper.treatment.mean - upper.baseline.mean));

    // Common random numbers make the difference tighter than either side.
    for (const auto* est : {&lower, &upper})
        CHECK(est->diff_std_err <= std::max(est->baseline.std_err, est->treatment.std_err));
}

TEST_CASE("revenue_compare_bk")
{
    const auto u = revenue_compare_bk(Uniform(0.0, 1.0), 1, 1'000'000, 21);
    CHECK(std::abs(u.treatment.mean - 1.0 / 3.0) <= 4.0 * u.treatment.std_err);
    CHECK(std::abs(u.baseline.mean - 1.0 / 4.0) <= 4.0 * u.baseline.std_err);
    CHECK(std::abs(u.diff_mean - 1.0 / 12.0) <= 4.0 * u.diff_std_err);

    const auto e = revenue_compare_bk(Exponential(1.0), 3, kN, 22);
    CHECK(e.diff_mean >= -3.0 * e.diff_std_err);

    const auto again = revenue_compare_bk(Exponential(1.0), 3, kN, 22);
    CHECK(same_bits(e.diff_mean, again.diff_mean));
}

TEST_CASE("efficiency_ratio")
{
    const auto e1 = efficiency_ratio(Exponential(1.0), 1, kN, 31);
    CHECK(e1.efficiency_ratio >= 1.0 - kAlpha - 3.0 * e1.efficiency_ratio_se);
    // Oracle: E[X; X >= 1] / E[X] = 2/e.
    CHECK(std::abs(e1.efficiency_ratio - 2.0 / std::exp(1.0)) <= 4.0 * e1.efficiency_ratio_se);
    CHECK(e1.revenue_ratio == 0.0);  // one bidder pays nothing under VCG

    const auto g3 = efficiency_ratio(GFamily(kAlpha, 1.0, 1e-6), 3, kN, 32);
    CHECK(g3.efficiency_ratio >= 1.0 - std::pow(kAlpha, 3) - 3.0 * g3.efficiency_ratio_se);

    const auto big = efficiency_ratio(Exponential(1.0), 30, 100'000, 33);
    CHECK(big.efficiency_ratio > 0.999);
}
