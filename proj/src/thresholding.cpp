#include "varexp/thresholding.hpp"

#include <cmath>
#include <stdexcept>

#include "varexp/signal.hpp"

namespace varexp {

namespace {

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

// sign(w)|w|^{1/(p-1)}, i.e. the scalar map at the conjugate exponent.
inline double jmap_conjugate(double w, double p) {
    if (w == 0.0) return 0.0;
    return sign(w) * std::pow(std::abs(w), 1.0 / (p - 1.0));
}

inline double jmap_primal(double x, double p) {
    if (x == 0.0) return 0.0;
    return sign(x) * std::pow(std::abs(x), p - 1.0);
}

inline void check_threshold(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("thresholding: t must be >= 0");
}

inline void check_exponent(double p) {
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("thresholding: p must lie in (1, 2]");
}

void check_step(std::span<const double> x, std::span<const double> grad, double tau, double lambda) {
    require_same_length(x.size(), grad.size(), "prox_step");
    if (!(tau > 0.0)) throw std::invalid_argument("prox_step: tau must be positive");
    check_threshold(lambda);
}

}  // namespace

double t_ista(double x, double s, double t) {
    check_threshold(t);
    if (x - s + t < 0.0) return x - s + t;
    if (x - s - t > 0.0) return x - s - t;
    return 0.0;
}

double t_alg1(double x, double s, double t, double p) {
    check_threshold(t);
    check_exponent(p);
    const double upper = jmap_conjugate(s + t, p);
    if (x >= upper) return x - upper;
    const double lower = jmap_conjugate(s - t, p);
    if (x <= lower) return x - lower;
    return 0.0;
}

double t_alg2(double x, double s, double t, double p) {
    check_threshold(t);
    check_exponent(p);
    const double jx = jmap_primal(x, p);
    const double e = 1.0 / (p - 1.0);
    if (s - t - jx > 0.0) return -std::pow(s - t - jx, e);
    if (jx - s - t > 0.0) return std::pow(jx - s - t, e);
    return 0.0;
}

std::vector<double> prox_step_alg1(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda, const ExponentMap& p) {
    check_step(x, grad, tau, lambda);
    require_same_length(x.size(), p.size(), "prox_step_alg1");
    std::vector<double> out(x.size());
    const double t = tau * lambda;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = t_alg1(x[i], tau * grad[i], t, p[i]);
    return out;
}

std::vector<double> prox_step_alg2(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda, const ExponentMap& p, bool scale_by_p) {
    check_step(x, grad, tau, lambda);
    require_same_length(x.size(), p.size(), "prox_step_alg2");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double scale = scale_by_p ? 1.0 / p[i] : 1.0;
        out[i] = t_alg2(x[i], tau * grad[i] * scale, tau * lambda * scale, p[i]);
    }
    return out;
}

std::vector<double> prox_step_ista(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda) {
    check_step(x, grad, tau, lambda);
    std::vector<double> out(x.size());
    const double t = tau * lambda;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = t_ista(x[i], tau * grad[i], t);
    return out;
}

double oracle_argmin_1d(const ScalarFunction& psi, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("oracle_argmin_1d: need lo < hi");
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = psi(c), fd = psi(d);
    for (int it = 0; it < 500; ++it) {
        if (!std::isfinite(fc) || !std::isfinite(fd))
            throw std::domain_error("oracle_argmin_1d: non-finite evaluation");
        if (b - a <= tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = psi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = psi(d);
        }
    }
    return 0.5 * (a + b);
}

std::pair<double, double> convex_bracket(const ScalarFunction& psi, double center, double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("convex_bracket: half width must be positive");
    const double f0 = psi(center);
    double w = half_width;
    for (int it = 0; it < 200; ++it) {
        if (psi(center - w) >= f0 && psi(center + w) >= f0) return {center - w, center + w};
        w *= 2.0;
    }
    throw std::domain_error("convex_bracket: function does not grow; not coercive?");
}

double oracle_half_width(double x, double s, double t) {
    return 10.0 * (1.0 + std::abs(x) + std::abs(s) + std::abs(t));
}

ScalarFunction psi_ista(double x, double s, double t) {
    return [=](double u) { return 0.5 * (u - x + s) * (u - x + s) + t * std::abs(u); };
}

ScalarFunction psi_alg1(double x, double s, double t, double p) {
    return [=](double u) { return std::pow(std::abs(u - x), p) / p + s * u + t * std::abs(u); };
}

ScalarFunction psi_alg2(double x, double s, double t, double p) {
    const double jx = std::copysign(std::pow(std::abs(x), p - 1.0), x);
    return [=](double u) { return std::pow(std::abs(u), p) / p - jx * u + s * u + t * std::abs(u); };
}

}  // namespace varexp
