#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varexp/exponent.hpp"
#include "varexp/objectives.hpp"
#include "varexp/signal.hpp"

namespace varexp {

enum class StopKind { relative_change, objective_gap };

struct StopRule {
    StopKind kind = StopKind::relative_change;
    double eps = 1e-4;
    /// phi_ref for objective_gap.
    double reference = std::numeric_limits<double>::quiet_NaN();

    static StopRule relative_change(double eps);
    static StopRule objective_gap(double eps, double reference);
};

/// relative_change: ||x_prev - x_next||_2 / ||x_prev||_2 < eps (absolute when x_prev = 0).
/// objective_gap:   |phi_next - phi_ref| / phi_ref < eps.
bool stop_check(const StopRule& rule, std::span<const double> x_prev, std::span<const double> x_next,
                double phi_next);

struct SolverConfig {
    double tau0 = 0.5;
    /// Lower bound on the backtracked step; the inner loop stops shrinking below it.
    double tau_min = 1e-12;
    double backtrack_rho = 0.5;
    double lambda = 0.0;
    int max_iters = 1000;
    int max_inner = 60;
    StopRule stop;
    /// Divide (s, t) by p_i in the Bregmanized step; off reproduces the printed thresholding.
    bool scale_by_p = false;
    /// phi_ref used for the residual column when the stop rule does not carry one.
    std::optional<double> reference_objective;
    bool record_timing = true;
    /// Abort after this many consecutive iterations that increase phi.
    int max_descent_violations = 10;

    void validate() const;
    PenaltySpec penalty() const { return PenaltySpec(lambda); }
};

struct IterationRecord {
    int k = 0;                          ///< index of the iterate x^k produced by this step (1-based)
    double objective = 0.0;             ///< phi(x^k)
    double residual = 0.0;              ///< phi(x^k) - phi_ref, NaN without a reference
    double relative_change = 0.0;       ///< ||x^{k-1} - x^k|| / ||x^{k-1}||
    double tau = 0.0;                   ///< accepted step
    int inner = 0;                      ///< backtracking shrinkages
    double modular_increment = 0.0;     ///< rho(x^{k-1} - x^k) in the solver's exponent
    double descent_surrogate = 0.0;     ///< g(x^{k-1}) - g(x^k) + <grad f(x^{k-1}), x^{k-1} - x^k>
    double wall_time = 0.0;             ///< cumulative seconds since the solver started
};

struct IterateTrace {
    std::string solver;
    double initial_objective = 0.0;
    std::vector<IterationRecord> records;
    bool converged = false;
    bool aborted = false;
    std::vector<std::string> warnings;

    int iterations() const { return static_cast<int>(records.size()); }
    double final_objective() const { return records.empty() ? initial_objective : records.back().objective; }
    double wall_time() const { return records.empty() ? 0.0 : records.back().wall_time; }
};

struct SolveResult {
    Signal x;
    IterateTrace trace;
};

/// Modular-proximal gradient with backtracking on rho(x^k - x^{k+1}) < 1.
/// Requires 1 < p_minus <= p_plus <= 2; tau restarts from tau0 every outer iteration.
SolveResult solve_alg1(const FidelitySpec& fid, const PenaltySpec& pen, const ExponentMap& p,
                       const SolverConfig& cfg, const Signal& x0);

/// Bregmanized modular-proximal gradient with constant step tau0.
SolveResult solve_alg2(const FidelitySpec& fid, const PenaltySpec& pen, const ExponentMap& p,
                       const SolverConfig& cfg, const Signal& x0);

/// Classical ISTA; the fidelity must be quadratic.
SolveResult solve_ista(const FidelitySpec& fid, const PenaltySpec& pen, const SolverConfig& cfg,
                       const Signal& x0);

/// Constant-exponent primal method in l^p (componentwise t_alg1, no backtracking).
SolveResult solve_bredies_lp(const FidelitySpec& fid, const PenaltySpec& pen, double p_const,
                             const SolverConfig& cfg, const Signal& x0);

/// Constant-exponent dual method in l^p (componentwise t_alg2).
SolveResult solve_guansong_lp(const FidelitySpec& fid, const PenaltySpec& pen, double p_const,
                              const SolverConfig& cfg, const Signal& x0);

}  // namespace varexp
