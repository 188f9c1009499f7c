#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "varexp/exponent.hpp"

namespace varexp {

// Scalar thresholding operators. Arguments follow the per-component subproblem:
// x is the current component, s = tau * gradient component, t = tau * lambda >= 0,
// and p in (1, 2] is the local exponent.

/// Soft-thresholding: argmin_u (1/2)(u - x + s)^2 + t|u|.
double t_ista(double x, double s, double t);

/// argmin_u (1/p)|u - x|^p + s u + t|u|.
double t_alg1(double x, double s, double t, double p);

/// argmin_u (1/p)|u|^p - j_p(x) u + s u + t|u|, where j_p(x) = sign(x)|x|^{p-1}.
double t_alg2(double x, double s, double t, double p);

/// Componentwise t_alg1(x_i, tau grad_i, tau lambda, p_i).
std::vector<double> prox_step_alg1(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda, const ExponentMap& p);

/// Componentwise t_alg2(x_i, tau grad_i, tau lambda, p_i). With scale_by_p the
/// pair (s, t) is divided by p_i, which is the exact minimizer of the
/// rho-based (not rho-bar-based) Bregman subproblem.
std::vector<double> prox_step_alg2(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda, const ExponentMap& p, bool scale_by_p = false);

/// Componentwise t_ista(x_i, tau grad_i, tau lambda).
std::vector<double> prox_step_ista(std::span<const double> x, std::span<const double> grad, double tau,
                                   double lambda);

// ---------------------------------------------------------------------------
// Verification oracle: derivative-free 1D minimization of convex functions.

using ScalarFunction = std::function<double(double)>;

/// Golden-section search for the minimizer of a convex psi on [lo, hi].
/// Stops once the bracket is narrower than tol * max(1, |midpoint|).
double oracle_argmin_1d(const ScalarFunction& psi, double lo, double hi, double tol = 1e-10);

/// Expands [center - half_width, center + half_width] geometrically until both
/// ends are no lower than psi(center); for convex coercive psi the minimizer
/// then lies inside.
std::pair<double, double> convex_bracket(const ScalarFunction& psi, double center, double half_width);

/// Default half-width 10 (1 + |x| + |s| + |t|) for the thresholding subproblems.
double oracle_half_width(double x, double s, double t);

ScalarFunction psi_ista(double x, double s, double t);
ScalarFunction psi_alg1(double x, double s, double t, double p);
ScalarFunction psi_alg2(double x, double s, double t, double p);

}  // namespace varexp
