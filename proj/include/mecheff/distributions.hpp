#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mecheff {

/// 1 - 1/e: the largest cdf value an MHR distribution can have at its reserve price.
inline constexpr double kAlpha = 1.0 - 1.0 / std::numbers::e;

/// Upper quantile used to truncate unbounded supports in grids and quadrature.
inline constexpr double kTailQuantile = 1.0 - 1e-12;

struct Atom {
    double location;
    double mass;
};

/// A value distribution supported on [0, support_hi()].
///
/// cdf() is right-continuous. density() is the density of the continuous
/// part only; point masses are reported by atoms(). Concrete families are
/// immutable after construction and safe to share across threads.
class ValueDistribution {
public:
    virtual ~ValueDistribution() = default;

    virtual double cdf(double x) const = 0;
    virtual double density(double x) const = 0;
    virtual double quantile(double u) const = 0;
    virtual double support_hi() const = 0;

    /// 1 - cdf(x). Families override this where the complement loses precision.
    virtual double survival(double x) const { return 1.0 - cdf(x); }

    /// density / survival; +infinity once the survival function vanishes.
    virtual double hazard(double x) const;

    virtual std::vector<Atom> atoms() const { return {}; }

    /// Points where density or hazard is not smooth. Quadrature splits here.
    virtual std::vector<double> kinks() const { return {}; }

    /// Exact reserve price for families where it is known in closed form.
    virtual std::optional<double> known_reserve() const { return std::nullopt; }

    /// Short spec string, e.g. "exponential:1".
    virtual std::string describe() const = 0;

    /// Largest point used by grids and quadrature: support_hi or the 1 - 1e-12 quantile.
    double effective_hi() const;
};

using DistributionPtr = std::shared_ptr<const ValueDistribution>;

class Exponential final : public ValueDistribution {
public:
    explicit Exponential(double rate);

    double cdf(double x) const override;
    double density(double x) const override;
    double quantile(double u) const override;
    double support_hi() const override;
    double survival(double x) const override;
    double hazard(double x) const override;
    std::optional<double> known_reserve() const override { return 1.0 / rate_; }
    std::string describe() const override;

    double rate() const { return rate_; }

private:
    double rate_;
};

/// Uniform on [lo, hi] with 0 <= lo < hi; zero density on [0, lo).
class Uniform final : public ValueDistribution {
public:
    Uniform(double lo, double hi);

    double cdf(double x) const override;
    double density(double x) const override;
    double quantile(double u) const override;
    double support_hi() const override;
    double survival(double x) const override;
    std::vector<double> kinks() const override;
    // x/(hi - x) = 1 at hi/2; when lo is past that the hazard jumps over 1/x at lo.
    std::optional<double> known_reserve() const override { return std::max(lo_, hi_ / 2.0); }
    std::string describe() const override;

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

struct GFamilyParams {
    double phi;
    double r;
    double eps;
    double t_knot;
};

/// The pointwise-minimal MHR distribution with reserve r and cdf(r) = phi.
///
/// Zero up to t_knot = r (1 + ln(1 - phi)), hazard 1/r on [t_knot, r), then a
/// uniform slab carrying the remaining 1 - phi of mass on [r, r + eps].
class GFamily final : public ValueDistribution {
public:
    /// eps defaults to 1e-6 * r. Requires 0 <= phi <= 1 - 1/e and 0 < eps <= r.
    GFamily(double phi, double r, std::optional<double> eps = std::nullopt);

    double cdf(double x) const override;
    double density(double x) const override;
    double quantile(double u) const override;
    double support_hi() const override;
    double survival(double x) const override;
    double hazard(double x) const override;
    std::vector<double> kinks() const override;
    std::optional<double> known_reserve() const override { return p_.r; }
    std::string describe() const override;

    const GFamilyParams& params() const { return p_; }

private:
    GFamilyParams p_;
};

struct PFamilyParams {
    double eps;
    double r;
};

/// Regular but not MHR: cdf 1 - eps/(x + eps) below r with an atom at r.
class PFamily final : public ValueDistribution {
public:
    PFamily(double eps, double r);

    double cdf(double x) const override;
    double density(double x) const override;
    double quantile(double u) const override;
    double support_hi() const override;
    double survival(double x) const override;
    double hazard(double x) const override;
    std::vector<Atom> atoms() const override;
    std::optional<double> known_reserve() const override { return p_.r; }
    std::string describe() const override;

    const PFamilyParams& params() const { return p_; }

private:
    PFamilyParams p_;
};

/// Result of a grid monotonicity check (hazard for MHR, virtual value for regularity).
struct MhrReport {
    bool is_mhr = true;
    std::optional<std::pair<double, double>> witness;
    int grid_size = 0;
};

/// Root of x * hazard(x) = 1, or the stored value for families that know it.
/// Throws NoRoot when x * hazard(x) stays below 1 over the whole support.
double reserve_price(const ValueDistribution& dist);

/// x - 1/hazard(x). Throws DomainError where the hazard is zero.
double virtual_value(const ValueDistribution& dist, double x);

/// Hazard nondecreasing on a quantile-spaced grid (slack 1e-9). grid_size >= 16.
MhrReport mhr_check(const ValueDistribution& dist, int grid_size);

/// Virtual value nondecreasing on the same grid. is_mhr carries the verdict.
MhrReport regularity_check(const ValueDistribution& dist, int grid_size);

/// cdf(reserve) <= 1 - 1/e + 1e-9.
bool lemma1_check(const ValueDistribution& dist);

/// cdf(y) >= G_{cdf(r), r}(y) - 1e-9 on a uniform grid of [0, r].
bool domination_check(const ValueDistribution& dist, int grid_size);

/// Inverse-cdf draw; an atom takes its whole mass interval. u in [0, 1).
double sample(const ValueDistribution& dist, double u);

}  // namespace mecheff
