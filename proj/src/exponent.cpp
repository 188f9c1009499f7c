#include "varexp/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "varexp/signal.hpp"

namespace varexp {

namespace {

// |v|^e with 0^e = 0 for e > 0.
inline double abs_pow(double v, double e) { return v == 0.0 ? 0.0 : std::pow(std::abs(v), e); }

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

inline double weight(CellWeights w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

void check_inputs(std::span<const double> x, const ExponentMap& p, CellWeights w, const char* what) {
    require_same_length(x.size(), p.size(), what);
    if (!w.empty()) require_same_length(w.size(), x.size(), what);
}

}  // namespace

ExponentMap::ExponentMap(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("ExponentMap: empty");
    for (double p : values_)
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("ExponentMap: exponent " + std::to_string(p) +
                                        " outside (1, +inf)");
    auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    p_minus_ = *lo;
    p_plus_ = *hi;
}

ExponentMap ExponentMap::constant(std::size_t n, double p) {
    return ExponentMap(std::vector<double>(n, p));
}

ExponentMap ExponentMap::conjugate() const {
    std::vector<double> q(values_.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = values_[i] / (values_[i] - 1.0);
    return ExponentMap(std::move(q));
}

double modular_rho(std::span<const double> x, const ExponentMap& p, CellWeights w) {
    check_inputs(x, p, w, "modular_rho");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weight(w, i) * abs_pow(x[i], p[i]);
    return s;
}

double modular_rho_bar(std::span<const double> x, const ExponentMap& p, CellWeights w) {
    check_inputs(x, p, w, "modular_rho_bar");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weight(w, i) * abs_pow(x[i], p[i]) / p[i];
    return s;
}

std::vector<double> grad_modular_rho(std::span<const double> x, const ExponentMap& p, CellWeights w) {
    check_inputs(x, p, w, "grad_modular_rho");
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = weight(w, i) * p[i] * sign(x[i]) * abs_pow(x[i], p[i] - 1.0);
    return g;
}

std::vector<double> grad_modular_rho_bar(std::span<const double> x, const ExponentMap& p,
                                         CellWeights w) {
    check_inputs(x, p, w, "grad_modular_rho_bar");
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = weight(w, i) * sign(x[i]) * abs_pow(x[i], p[i] - 1.0);
    return g;
}

double pointwise_jmap(double t, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("pointwise_jmap: exponent must exceed 1");
    return sign(t) * abs_pow(t, p - 1.0);
}

std::vector<double> jmap(std::span<const double> x, const ExponentMap& p) {
    require_same_length(x.size(), p.size(), "jmap");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = sign(x[i]) * abs_pow(x[i], p[i] - 1.0);
    return out;
}

namespace {

// Root of m(lambda) = 1 for continuous strictly decreasing m on (domain_lower, inf).
double solve_unit_modular(const std::function<double(double)>& m, double tol, double domain_lower,
                          double lambda0) {
    if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tolerance must be positive");
    if (!(lambda0 > domain_lower)) lambda0 = domain_lower + std::max(1.0, std::abs(domain_lower));

    double hi = lambda0;
    int guard = 0;
    while (m(hi) > 1.0) {
        hi = domain_lower + 2.0 * (hi - domain_lower);
        if (++guard > 2100 || !std::isfinite(hi))
            throw std::runtime_error("luxemburg_norm: failed to bracket from above");
    }
    double lo = lambda0;
    guard = 0;
    while (m(lo) <= 1.0) {
        lo = domain_lower + 0.5 * (lo - domain_lower);
        if (++guard > 2100 || !(lo > domain_lower))
            throw std::runtime_error("luxemburg_norm: failed to bracket from below");
    }

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 4000; ++it) {
        mid = 0.5 * (lo + hi);
        const double value = m(mid);
        if (std::abs(value - 1.0) <= tol) break;
        if (value > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return mid;
}

}  // namespace

double luxemburg_norm(std::span<const double> x, const ExponentMap& p, double tol, CellWeights w) {
    check_inputs(x, p, w, "luxemburg_norm");
    if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tolerance must be positive");
    if (!all_finite(x)) throw std::invalid_argument("luxemburg_norm: non-finite input");
    if (norm_inf(x) == 0.0) return 0.0;

    const auto scaled_modular = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += weight(w, i) * abs_pow(x[i] / lambda, p[i]);
        return s;
    };
    const double lambda0 = std::pow(std::max(modular_rho(x, p, w), 1.0), 1.0 / p.p_minus());
    return solve_unit_modular(scaled_modular, tol, 0.0, lambda0);
}

double luxemburg_norm_scalar(const std::function<double(double)>& modular_of_lambda, double tol,
                             double domain_lower, double lambda0) {
    return solve_unit_modular(modular_of_lambda, tol, domain_lower, lambda0);
}

DualityMapResult duality_map_lpvar(std::span<const double> x, const ExponentMap& p, double r) {
    require_same_length(x.size(), p.size(), "duality_map_lpvar");
    if (!(r > 1.0)) throw std::invalid_argument("duality_map_lpvar: r must exceed 1");
    const double norm = luxemburg_norm(x, p);
    if (norm == 0.0) return {std::vector<double>(x.size(), 0.0), false};

    double denom = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) denom += p[i] * abs_pow(x[i] / norm, p[i]);

    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = p[i] * sign(x[i]) * abs_pow(x[i], p[i] - 1.0) / std::pow(norm, p[i] - r) / denom;
    return {std::move(out), true};
}

}  // namespace varexp
