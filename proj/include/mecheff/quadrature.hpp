#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace mecheff {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth)
{
    const double lm = (a + m) / 2.0;
    const double rm = (m + b) / 2.0;
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || lm <= a || rm >= b)
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance abs_tol.
///
/// The interval is first cut at every breakpoint strictly inside (a, b) and
/// the tolerance is shared evenly between the pieces. Each piece is seeded
/// with a 16-panel split so narrow features are not skipped by the first
/// three-point estimate. The integrand is never evaluated exactly on a cut.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, std::span<const double> breakpoints = {})
{
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    constexpr int kPanels = 16;
    constexpr int kMaxDepth = 48;
    const double piece_tol = abs_tol / static_cast<double>((cuts.size() - 1) * kPanels);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double width = (cuts[i + 1] - lo) / kPanels;
        for (int p = 0; p < kPanels; ++p) {
            const double x0 = lo + width * p;
            const double x1 = (p + 1 == kPanels) ? cuts[i + 1] : lo + width * (p + 1);
            const double xm = (x0 + x1) / 2.0;
            // Breakpoints are evaluated from the inside so a jump there is not sampled.
            const double f0 = f(p == 0 ? std::nextafter(x0, x1) : x0);
            const double f1 = f(p + 1 == kPanels ? std::nextafter(x1, x0) : x1);
            const double fm = f(xm);
            const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            total += detail::simpson_step(f, x0, f0, x1, f1, xm, fm, whole, piece_tol, kMaxDepth);
        }
    }
    return total;
}

}  // namespace mecheff
