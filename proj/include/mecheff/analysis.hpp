#pragma once

#include "mecheff/distributions.hpp"

namespace mecheff {

/// Analytic Gain and Loss for the extremal distribution G_{phi,r}.
struct GainLossReport {
    int k = 1;
    int m = 1;
    double phi = 0.0;
    double r = 0.0;
    double gain = 0.0;
    double loss = 0.0;
    double diff = 0.0;  // gain - loss
};

/// Extra-bidder counts for k original bidders and t items.
struct BoundSet {
    int k = 1;
    int t = 1;
    int m_upper = 0;  // suffices for one item
    int m_lower = 0;  // does not suffice on G_{alpha,r}
    int s_multi = 0;  // further bidders for t items
    double epsilon_slack = 0.1;
};

/// cdf of the maximum of k draws: cdf(x)^k.
double order_stat_cdf(const ValueDistribution& dist, int k, double x);

/// E[max of k draws | all k below the reserve], integrating x d(F^k) with the
/// conditional density k (F/F(r))^(k-1) f / F(r). Atoms at or below r are
/// added as point contributions. Throws DegenerateConditioning if F(r) < 1e-12.
double loss_numeric(const ValueDistribution& dist, int k);

/// The same quantity by parts: r - integral over [0, r] of (F(x)/F(r))^k.
double loss_numeric_by_parts(const ValueDistribution& dist, int k);

/// Sum over j >= 1 of x^j / (k + j). Equals -(ln(1-x) + sum_{i<=k} x^i/i) / x^k.
double log_tail_ratio(double x, int k);

/// r (phi^k + ln(1-phi) + sum_{i<=k} phi^i/i) / phi^k, evaluated as
/// r (1 - log_tail_ratio(phi, k)). Requires 0 < phi <= 1 - 1/e.
double loss_closed_form_g(double phi, double r, int k);

/// (1 - phi^m) r.
double gain(double phi, double r, int m);

/// gain(phi, r, m) - loss_closed_form_g(phi, r, k) = r (log_tail_ratio - phi^m).
double gain_minus_loss_g(double phi, double r, int k, int m);

GainLossReport gain_loss_report(double phi, double r, int k, int m);

/// q(x) = x^(k+m) + ln(1-x) + sum_{i<=k} x^i/i for 0 <= x < 1.
double q_poly(double x, int k, int m);

/// q'(x) = x^k/(1-x) ((k+m) x^(m-1) (1-x) - 1) for 0 <= x < 1.
double q_prime(double x, int k, int m);

/// floor(log_{1/alpha}(2k)) + 2.
int upper_bound_m(int k);

/// max(0, floor(log_{1/alpha}((k+1)(1-alpha))) + 1).
int lower_bound_m(int k);

/// ceil(t + (1+eps) t ln m + ln t). Requires t >= 1, m >= 2, eps > 0.
int multi_item_s(int t, int m, double epsilon_slack);

BoundSet bound_set(int k, int t, double epsilon_slack);

/// Expected efficiency the m+s extra bidders add when t_res items remain:
/// r (t_res - sum_{j<t_res} a_j (t_res - j)), a_j = C(m+s, j) phi^(m+s-j) (1-phi)^j.
double multi_gain_exact(double phi, double r, int m, int s, int t_res);

/// Efficiency the m extra bidders bring on P_{eps,r}: r (1 - (r/(r+eps))^m).
double regular_gain(double eps, double r, int m);

/// Unconditional loss on P_{eps,r}: integral over [0, r) of x d(P^k), by quadrature.
double regular_loss(double eps, double r, int k);

struct RegularCounterexample {
    double eps = 0.0;
    double loss = 0.0;
    double gain = 0.0;
};

/// Halves eps from r until regular_loss - regular_gain > min_margin.
/// Throws SearchExhausted once eps drops below 1e-15.
RegularCounterexample regular_counterexample_search(int k, int m, double r, double min_margin);

/// Same search with the default margin 1e-6 r.
RegularCounterexample regular_counterexample_search(int k, int m, double r);

}  // namespace mecheff
