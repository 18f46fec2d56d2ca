#include "mecheff/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mecheff/errors.hpp"
#include "mecheff/format.hpp"

namespace mecheff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi values this far above 1 - 1/e are treated as rounding noise and clamped.
constexpr double kPhiSlack = 1e-9;

constexpr double kGridSlack = 1e-9;
constexpr double kSurvivalFloor = 1e-12;

void require(bool ok, const char* what)
{
    if (!ok) throw DomainError(what);
}

bool is_atom(const std::vector<Atom>& atoms, double x)
{
    return std::any_of(atoms.begin(), atoms.end(),
                       [x](const Atom& a) { return a.location == x; });
}

// Quantile-spaced evaluation points, skipping atoms, the vanishing tail and duplicates.
std::vector<double> quantile_grid(const ValueDistribution& dist, int grid_size)
{
    require(grid_size >= 16, "grid_size must be at least 16");
    const auto atoms = dist.atoms();
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        const double u = (i + 0.5) / grid_size;
        const double x = dist.quantile(u);
        if (!std::isfinite(x) || is_atom(atoms, x)) continue;
        if (dist.survival(x) <= kSurvivalFloor) continue;
        if (!xs.empty() && x <= xs.back()) continue;
        xs.push_back(x);
    }
    return xs;
}

}  // namespace

double ValueDistribution::hazard(double x) const
{
    const double s = survival(x);
    if (s <= 0.0) return kInf;
    return density(x) / s;
}

double ValueDistribution::effective_hi() const
{
    const double hi = support_hi();
    return std::isfinite(hi) ? hi : quantile(kTailQuantile);
}

// ---------------------------------------------------------------------------
// Exponential

Exponential::Exponential(double rate) : rate_(rate)
{
    require(std::isfinite(rate) && rate > 0.0, "exponential rate must be positive");
}

double Exponential::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
double Exponential::density(double x) const { return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x); }
double Exponential::survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
double Exponential::hazard(double x) const { return x < 0.0 ? 0.0 : rate_; }
double Exponential::support_hi() const { return kInf; }

double Exponential::quantile(double u) const
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInf;
    return -std::log1p(-u) / rate_;
}

std::string Exponential::describe() const { return "exponential:" + format_double(rate_); }

// ---------------------------------------------------------------------------
// Uniform

Uniform::Uniform(double lo, double hi) : lo_(lo), hi_(hi)
{
    require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi,
            "uniform requires 0 <= lo < hi");
}

double Uniform::cdf(double x) const
{
    if (x < lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return (x - lo_) / (hi_ - lo_);
}

double Uniform::survival(double x) const
{
    if (x < lo_) return 1.0;
    if (x >= hi_) return 0.0;
    return (hi_ - x) / (hi_ - lo_);
}

double Uniform::density(double x) const { return (x >= lo_ && x < hi_) ? 1.0 / (hi_ - lo_) : 0.0; }

double Uniform::quantile(double u) const
{
    u = std::clamp(u, 0.0, 1.0);
    return lo_ + u * (hi_ - lo_);
}

double Uniform::support_hi() const { return hi_; }

std::vector<double> Uniform::kinks() const
{
    if (lo_ > 0.0) return {lo_};
    return {};
}

std::string Uniform::describe() const
{
    return "uniform:" + format_double(lo_) + ":" + format_double(hi_);
}

// ---------------------------------------------------------------------------
// GFamily

GFamily::GFamily(double phi, double r, std::optional<double> eps)
{
    require(std::isfinite(r) && r > 0.0, "G family requires r > 0");
    require(std::isfinite(phi) && phi >= 0.0, "G family requires phi >= 0");
    require(phi <= kAlpha + kPhiSlack, "G family requires phi <= 1 - 1/e");
    phi = std::min(phi, kAlpha);
    const double e = eps.value_or(1e-6 * r);
    require(std::isfinite(e) && e > 0.0 && e <= r, "G family requires 0 < eps <= r");
    const double t = std::clamp(r * (1.0 + std::log1p(-phi)), 0.0, r);
    p_ = GFamilyParams{phi, r, e, t};
}

double GFamily::cdf(double x) const
{
    const auto& [phi, r, eps, t] = p_;
    if (x < t) return 0.0;
    if (x < r) return -std::expm1(-(x - t) / r);
    if (x < r + eps) return phi + (1.0 - phi) * (x - r) / eps;
    return 1.0;
}

double GFamily::survival(double x) const
{
    const auto& [phi, r, eps, t] = p_;
    if (x < t) return 1.0;
    if (x < r) return std::exp(-(x - t) / r);
    if (x < r + eps) return (1.0 - phi) * (1.0 - (x - r) / eps);
    return 0.0;
}

double GFamily::density(double x) const
{
    const auto& [phi, r, eps, t] = p_;
    if (x < t) return 0.0;
    if (x < r) return std::exp(-(x - t) / r) / r;
    if (x < r + eps) return (1.0 - phi) / eps;
    return 0.0;
}

double GFamily::hazard(double x) const
{
    const auto& [phi, r, eps, t] = p_;
    if (x < t) return 0.0;
    if (x < r) return 1.0 / r;
    if (x < r + eps) return 1.0 / (r + eps - x);
    return kInf;
}

double GFamily::quantile(double u) const
{
    const auto& [phi, r, eps, t] = p_;
    u = std::clamp(u, 0.0, 1.0);
    if (u < phi) return std::min(r, t - r * std::log1p(-u));
    return r + eps * (u - phi) / (1.0 - phi);
}

double GFamily::support_hi() const { return p_.r + p_.eps; }

std::vector<double> GFamily::kinks() const
{
    std::vector<double> k;
    if (p_.t_knot > 0.0 && p_.t_knot < p_.r) k.push_back(p_.t_knot);
    k.push_back(p_.r);
    return k;
}

std::string GFamily::describe() const
{
    return "g:" + format_double(p_.phi) + ":" + format_double(p_.r) + ":" + format_double(p_.eps);
}

// ---------------------------------------------------------------------------
// PFamily

PFamily::PFamily(double eps, double r) : p_{eps, r}
{
    require(std::isfinite(eps) && eps > 0.0, "P family requires eps > 0");
    require(std::isfinite(r) && r > 0.0, "P family requires r > 0");
}

double PFamily::cdf(double x) const
{
    if (x <= 0.0) return 0.0;
    if (x < p_.r) return x / (x + p_.eps);
    return 1.0;
}

double PFamily::survival(double x) const
{
    if (x <= 0.0) return 1.0;
    if (x < p_.r) return p_.eps / (x + p_.eps);
    return 0.0;
}

double PFamily::density(double x) const
{
    if (x < 0.0 || x >= p_.r) return 0.0;
    const double d = x + p_.eps;
    return p_.eps / (d * d);
}

double PFamily::hazard(double x) const
{
    if (x < 0.0) return 0.0;
    if (x < p_.r) return 1.0 / (x + p_.eps);
    return kInf;
}

double PFamily::quantile(double u) const
{
    u = std::clamp(u, 0.0, 1.0);
    if (u < p_.r / (p_.r + p_.eps)) return std::min(p_.r, p_.eps * u / (1.0 - u));
    return p_.r;
}

double PFamily::support_hi() const { return p_.r; }

std::vector<Atom> PFamily::atoms() const { return {Atom{p_.r, p_.eps / (p_.r + p_.eps)}}; }

std::string PFamily::describe() const
{
    return "p:" + format_double(p_.eps) + ":" + format_double(p_.r);
}

// ---------------------------------------------------------------------------
// Reserve price and friends

double reserve_price(const ValueDistribution& dist)
{
    if (auto known = dist.known_reserve()) return *known;

    // Bracketed bisection on g(x) = x h(x) - 1; the hazard may have kinks.
    const auto g = [&dist](double x) { return x * dist.hazard(x) - 1.0; };
    // Past the 1 - 1e-12 quantile the survival function is mostly rounding noise.
    const double hi_support = dist.effective_hi();

    double lo = dist.quantile(0.5);
    double hi = lo;
    if (!(lo > 0.0)) lo = hi = std::min(1.0, hi_support / 2.0);

    if (g(lo) < 0.0) {
        bool found = false;
        for (int i = 0; i < 2048 && !found; ++i) {
            lo = hi;
            hi = std::min(hi * 2.0, hi_support);
            found = g(hi) >= 0.0;
            if (!found && hi >= hi_support) break;
        }
        if (!found)
            throw NoRoot("x * hazard(x) < 1 on the whole support of " + dist.describe());
    } else {
        bool found = false;
        for (int i = 0; i < 2048 && !found; ++i) {
            hi = lo;
            lo = hi / 2.0;
            if (lo == 0.0) break;
            found = g(lo) < 0.0;
        }
        if (!found)
            throw NoRoot("x * hazard(x) >= 1 down to 0 for " + dist.describe());
    }

    for (int i = 0; i < 400; ++i) {
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo + (hi - lo) / 2.0;
}

double virtual_value(const ValueDistribution& dist, double x)
{
    const double h = dist.hazard(x);
    if (!(h > 0.0)) throw DomainError("virtual value is -infinity where the hazard is zero");
    return x - 1.0 / h;
}

MhrReport mhr_check(const ValueDistribution& dist, int grid_size)
{
    MhrReport rep;
    rep.grid_size = grid_size;
    const auto xs = quantile_grid(dist, grid_size);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (dist.hazard(xs[i]) > dist.hazard(xs[i + 1]) + kGridSlack) {
            rep.is_mhr = false;
            rep.witness = std::pair{xs[i], xs[i + 1]};
            break;
        }
    }
    return rep;
}

MhrReport regularity_check(const ValueDistribution& dist, int grid_size)
{
    MhrReport rep;
    rep.grid_size = grid_size;
    const auto xs = quantile_grid(dist, grid_size);
    std::optional<std::pair<double, double>> prev;  // (x, psi)
    for (double x : xs) {
        if (!(dist.hazard(x) > 0.0)) continue;  // psi = -inf, below everything
        const double psi = virtual_value(dist, x);
        if (prev && prev->second > psi + kGridSlack * std::max(1.0, std::abs(psi))) {
            rep.is_mhr = false;
            rep.witness = std::pair{prev->first, x};
            break;
        }
        prev = std::pair{x, psi};
    }
    return rep;
}

bool lemma1_check(const ValueDistribution& dist)
{
    return dist.cdf(reserve_price(dist)) <= kAlpha + 1e-9;
}

bool domination_check(const ValueDistribution& dist, int grid_size)
{
    require(grid_size >= 2, "grid_size must be at least 2");
    const double r = reserve_price(dist);
    const GFamily extremal(dist.cdf(r), r);
    for (int i = 0; i < grid_size; ++i) {
        const double y = r * static_cast<double>(i) / (grid_size - 1);
        if (dist.cdf(y) < extremal.cdf(y) - 1e-9) return false;
    }
    return true;
}

double sample(const ValueDistribution& dist, double u)
{
    return dist.quantile(std::clamp(u, 0.0, std::nextafter(1.0, 0.0)));
}

}  // namespace mecheff
