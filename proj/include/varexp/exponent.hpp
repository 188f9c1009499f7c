#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace varexp {

/// Per-sample exponents p_i of a discrete variable-exponent space, with the
/// essential infimum/supremum cached.
///
/// Every exponent satisfies 1 < p_i < +inf. The stricter p_plus <= 2 needed by
/// the modular-proximal solvers is checked by those solvers, not here.
class ExponentMap {
public:
    ExponentMap() = default;
    explicit ExponentMap(std::vector<double> values);

    static ExponentMap constant(std::size_t n, double p);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }
    bool is_constant() const { return p_minus_ == p_plus_; }

    /// Hölder conjugate map p'_i = p_i / (p_i - 1).
    ExponentMap conjugate() const;

private:
    std::vector<double> values_;
    double p_minus_ = 0.0;
    double p_plus_ = 0.0;
};

using ConjugateExponentMap = ExponentMap;

/// Optional per-cell measure; an empty span means unit weights (counting measure).
using CellWeights = std::span<const double>;

/// sum_i w_i |x_i|^{p_i}
double modular_rho(std::span<const double> x, const ExponentMap& p, CellWeights w = {});

/// sum_i (w_i / p_i) |x_i|^{p_i}
double modular_rho_bar(std::span<const double> x, const ExponentMap& p, CellWeights w = {});

/// Component i is w_i p_i sign(x_i)|x_i|^{p_i - 1}.
std::vector<double> grad_modular_rho(std::span<const double> x, const ExponentMap& p,
                                     CellWeights w = {});

/// Component i is w_i sign(x_i)|x_i|^{p_i - 1}.
std::vector<double> grad_modular_rho_bar(std::span<const double> x, const ExponentMap& p,
                                         CellWeights w = {});

/// Scalar map t -> sign(t)|t|^{p-1}. Its inverse is the same map at the conjugate exponent.
double pointwise_jmap(double t, double p);

/// Componentwise pointwise_jmap(x_i, p_i).
std::vector<double> jmap(std::span<const double> x, const ExponentMap& p);

inline constexpr double kLuxemburgTolerance = 1e-12;

/// Luxemburg norm inf{lambda > 0 : rho(x / lambda) <= 1}.
///
/// Brackets the root of lambda -> rho(x / lambda) - 1 geometrically from
/// lambda0 = max(rho(x), 1)^{1/p_minus}, then bisects until
/// |rho(x / lambda) - 1| <= tol or the bracket collapses to a few ulps.
double luxemburg_norm(std::span<const double> x, const ExponentMap& p,
                      double tol = kLuxemburgTolerance, CellWeights w = {});

/// Same root search for an arbitrary continuous, strictly decreasing
/// lambda -> modular(x / lambda), defined on (domain_lower, +inf).
///
/// Useful when the modular is known in closed form but the sample vector is
/// not representable, e.g. 1 / (lambda ln lambda) on (1, +inf).
double luxemburg_norm_scalar(const std::function<double(double)>& modular_of_lambda,
                             double tol = kLuxemburgTolerance, double domain_lower = 0.0,
                             double lambda0 = 1.0);

struct DualityMapResult {
    std::vector<double> value;
    /// False at x = 0, where the map is not defined and value is the zero vector.
    bool defined = true;
};

/// Discrete representer of the r-duality map of the Luxemburg-normed space.
/// Diagnostic only; the solvers never call it.
DualityMapResult duality_map_lpvar(std::span<const double> x, const ExponentMap& p, double r);

}  // namespace varexp
