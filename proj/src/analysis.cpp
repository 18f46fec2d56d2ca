#include "mecheff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mecheff/errors.hpp"
#include "mecheff/quadrature.hpp"

namespace mecheff {

namespace {

constexpr double kPhiSlack = 1e-9;

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

double checked_phi(double phi, bool allow_zero)
{
    require(std::isfinite(phi) && (allow_zero ? phi >= 0.0 : phi > 0.0) && phi <= kAlpha + kPhiSlack,
            allow_zero ? "phi must lie in [0, 1 - 1/e]" : "phi must lie in (0, 1 - 1/e]");
    return std::min(phi, kAlpha);
}

double log_inv_alpha() { return -std::log(kAlpha); }

}  // namespace

double order_stat_cdf(const ValueDistribution& dist, int k, double x)
{
    require(k >= 1, "k must be at least 1");
    return std::pow(dist.cdf(x), k);
}

double loss_numeric(const ValueDistribution& dist, int k)
{
    require(k >= 1, "k must be at least 1");
    const double r = reserve_price(dist);
    const double fr = dist.cdf(r);
    if (fr < 1e-12) throw DegenerateConditioning("cdf at the reserve price is below 1e-12");

    const auto integrand = [&](double x) {
        const double f = dist.density(x);
        if (f == 0.0) return 0.0;
        return x * k * std::pow(dist.cdf(x) / fr, k - 1) * f / fr;
    };
    const auto kinks = dist.kinks();
    double total = integrate(integrand, 0.0, r, 1e-12 * std::max(1.0, r), kinks);
    for (const Atom& a : dist.atoms()) {
        if (a.location > r) continue;
        const double above = dist.cdf(a.location) / fr;
        const double below = std::max(0.0, dist.cdf(a.location) - a.mass) / fr;
        total += a.location * (std::pow(above, k) - std::pow(below, k));
    }
    return total;
}

double loss_numeric_by_parts(const ValueDistribution& dist, int k)
{
    require(k >= 1, "k must be at least 1");
    const double r = reserve_price(dist);
    const double fr = dist.cdf(r);
    if (fr < 1e-12) throw DegenerateConditioning("cdf at the reserve price is below 1e-12");

    const auto integrand = [&](double x) { return std::pow(dist.cdf(x) / fr, k); };
    const auto kinks = dist.kinks();
    return r - integrate(integrand, 0.0, r, 1e-12 * std::max(1.0, r), kinks);
}

double log_tail_ratio(double x, int k)
{
    require(x >= 0.0 && x < 1.0, "x must lie in [0, 1)");
    require(k >= 1, "k must be at least 1");
    double sum = 0.0;
    double power = 1.0;
    for (long j = 1;; ++j) {
        power *= x;
        const double term = power / static_cast<double>(k + j);
        sum += term;
        if (term <= 1e-17 * sum || power == 0.0) break;
    }
    return sum;
}

double loss_closed_form_g(double phi, double r, int k)
{
    phi = checked_phi(phi, false);
    require(r > 0.0, "r must be positive");
    return r * (1.0 - log_tail_ratio(phi, k));
}

double gain(double phi, double r, int m)
{
    phi = checked_phi(phi, true);
    require(r > 0.0, "r must be positive");
    require(m >= 0, "m must be nonnegative");
    return (1.0 - std::pow(phi, m)) * r;
}

double gain_minus_loss_g(double phi, double r, int k, int m)
{
    phi = checked_phi(phi, false);
    require(r > 0.0, "r must be positive");
    require(m >= 0, "m must be nonnegative");
    return r * (log_tail_ratio(phi, k) - std::pow(phi, m));
}

GainLossReport gain_loss_report(double phi, double r, int k, int m)
{
    GainLossReport rep;
    rep.k = k;
    rep.m = m;
    rep.phi = phi;
    rep.r = r;
    rep.gain = gain(phi, r, m);
    rep.loss = loss_closed_form_g(phi, r, k);
    rep.diff = rep.gain - rep.loss;
    return rep;
}

double q_poly(double x, int k, int m)
{
    require(x >= 0.0 && x < 1.0, "q is defined on [0, 1)");
    require(k >= 1 && m >= 0, "q requires k >= 1 and m >= 0");
    if (x <= 0.999) return std::pow(x, k) * (std::pow(x, m) - log_tail_ratio(x, k));

    // Near 1 the tail series converges too slowly; the direct form is well conditioned there.
    double sum = std::pow(x, k + m) + std::log1p(-x);
    double comp = 0.0;
    double power = 1.0;
    for (int i = 1; i <= k; ++i) {
        power *= x;
        const double y = power / i - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double q_prime(double x, int k, int m)
{
    require(x >= 0.0 && x < 1.0, "q' is defined on [0, 1)");
    require(k >= 1 && m >= 1, "q' requires k >= 1 and m >= 1");
    return std::pow(x, k) / (1.0 - x) * ((k + m) * std::pow(x, m - 1) * (1.0 - x) - 1.0);
}

int upper_bound_m(int k)
{
    require(k >= 1, "k must be at least 1");
    return static_cast<int>(std::floor(std::log(2.0 * k) / log_inv_alpha())) + 2;
}

int lower_bound_m(int k)
{
    require(k >= 1, "k must be at least 1");
    const double v = std::floor(std::log((k + 1.0) * (1.0 - kAlpha)) / log_inv_alpha()) + 1.0;
    return std::max(0, static_cast<int>(v));
}

int multi_item_s(int t, int m, double epsilon_slack)
{
    require(t >= 1 && m >= 2 && epsilon_slack > 0.0, "multi_item_s requires t >= 1, m >= 2, eps > 0");
    const double v = t + (1.0 + epsilon_slack) * t * std::log(static_cast<double>(m)) + std::log(static_cast<double>(t));
    return static_cast<int>(std::ceil(v));
}

BoundSet bound_set(int k, int t, double epsilon_slack)
{
    BoundSet b;
    b.k = k;
    b.t = t;
    b.m_upper = upper_bound_m(k);
    b.m_lower = lower_bound_m(k);
    b.s_multi = multi_item_s(t, b.m_upper, epsilon_slack);
    b.epsilon_slack = epsilon_slack;
    return b;
}

double multi_gain_exact(double phi, double r, int m, int s, int t_res)
{
    phi = checked_phi(phi, true);
    require(r > 0.0, "r must be positive");
    require(m >= 0 && s >= 0 && t_res >= 1, "multi_gain_exact requires m, s >= 0 and t_res >= 1");
    const int n = m + s;
    double shortfall = 0.0;
    for (int j = 0; j < t_res && j <= n; ++j) {
        double log_choose = 0.0;
        for (int i = 1; i <= j; ++i) log_choose += std::log(static_cast<double>(n - j + i) / i);
        const double a_j = std::exp(log_choose) * std::pow(phi, n - j) * std::pow(1.0 - phi, j);
        shortfall += a_j * (t_res - j);
    }
    return r * (t_res - shortfall);
}

double regular_gain(double eps, double r, int m)
{
    require(eps > 0.0 && r > 0.0 && m >= 0, "regular_gain requires eps, r > 0 and m >= 0");
    return r * -std::expm1(m * std::log(r / (r + eps)));
}

double regular_loss(double eps, double r, int k)
{
    require(k >= 1, "k must be at least 1");
    const PFamily dist(eps, r);
    const auto integrand = [&](double x) {
        return x * k * std::pow(dist.cdf(x), k - 1) * dist.density(x);
    };
    // The integrand peaks near x = eps; cut geometrically from there up to r.
    std::vector<double> cuts;
    for (double c = eps; c < r; c *= 4.0) cuts.push_back(c);
    return integrate(integrand, 0.0, r, 1e-13 * r, cuts);
}

RegularCounterexample regular_counterexample_search(int k, int m, double r, double min_margin)
{
    require(k >= 1 && m >= 0 && r > 0.0, "search requires k >= 1, m >= 0, r > 0");
    for (double eps = r; eps >= 1e-15; eps /= 2.0) {
        const double loss = regular_loss(eps, r, k);
        const double g = regular_gain(eps, r, m);
        if (loss - g > min_margin) return {eps, loss, g};
    }
    throw SearchExhausted("no eps above 1e-15 makes the loss exceed the gain");
}

RegularCounterexample regular_counterexample_search(int k, int m, double r)
{
    return regular_counterexample_search(k, m, r, 1e-6 * r);
}

}  // namespace mecheff
