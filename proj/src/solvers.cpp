#include "varexp/solvers.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "varexp/thresholding.hpp"

namespace varexp {

StopRule StopRule::relative_change(double eps) { return {StopKind::relative_change, eps, std::nan("")}; }

StopRule StopRule::objective_gap(double eps, double reference) {
    return {StopKind::objective_gap, eps, reference};
}

bool stop_check(const StopRule& rule, std::span<const double> x_prev, std::span<const double> x_next,
                double phi_next) {
    if (rule.kind == StopKind::relative_change) {
        const double diff = norm2(subtract(x_prev, x_next));
        const double base = norm2(x_prev);
        return (base > 0.0 ? diff / base : diff) < rule.eps;
    }
    if (rule.reference == 0.0 || !std::isfinite(rule.reference))
        throw std::invalid_argument("stop_check: objective_gap needs a finite non-zero reference");
    return std::abs(phi_next - rule.reference) / rule.reference < rule.eps;
}

void SolverConfig::validate() const {
    if (!(tau0 > 0.0)) throw std::invalid_argument("SolverConfig: tau0 must be positive");
    if (!(tau_min > 0.0 && tau_min <= tau0))
        throw std::invalid_argument("SolverConfig: need 0 < tau_min <= tau0");
    if (!(backtrack_rho > 0.0 && backtrack_rho < 1.0))
        throw std::invalid_argument("SolverConfig: backtrack_rho must lie in (0, 1)");
    if (!(lambda >= 0.0)) throw std::invalid_argument("SolverConfig: lambda must be >= 0");
    if (max_iters < 0 || max_inner < 0) throw std::invalid_argument("SolverConfig: negative iteration cap");
    if (!(stop.eps > 0.0)) throw std::invalid_argument("SolverConfig: stop eps must be positive");
    if (stop.kind == StopKind::objective_gap && (!std::isfinite(stop.reference) || stop.reference == 0.0))
        throw std::invalid_argument("SolverConfig: objective_gap needs a finite non-zero reference");
}

namespace {

struct StepOutcome {
    std::vector<double> next;
    double tau = 0.0;
    int inner = 0;
    bool capped = false;
};

using StepFn = std::function<StepOutcome(std::span<const double> x, std::span<const double> grad)>;

void check_exponent_range(const ExponentMap& p, std::size_t n, const char* solver) {
    require_same_length(p.size(), n, solver);
    if (p.p_plus() > 2.0)
        throw std::invalid_argument(std::string(solver) + ": exponent map must satisfy p_plus <= 2");
}

// Shared outer loop: gradient, step, bookkeeping, descent monitor, stop rule.
SolveResult run(const char* name, const FidelitySpec& fid, const PenaltySpec& pen, const ExponentMap& p_trace,
                const SolverConfig& cfg, const Signal& x0, const StepFn& step) {
    cfg.validate();
    require_same_length(x0.size(), fid.op().input_shape().size(), name);

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    double reference = std::nan("");
    if (cfg.stop.kind == StopKind::objective_gap)
        reference = cfg.stop.reference;
    else if (cfg.reference_objective)
        reference = *cfg.reference_objective;

    IterateTrace trace;
    trace.solver = name;
    std::vector<double> x = x0.vector();
    double phi = objective_value(fid, pen, x);
    if (!std::isfinite(phi)) throw std::runtime_error(std::string(name) + ": non-finite initial objective");
    trace.initial_objective = phi;
    trace.records.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 1 << 16)));

    int violations = 0;
    bool warned_cap = false;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        const auto grad = fid.gradient(x);
        StepOutcome out = step(x, grad);
        const double phi_next = objective_value(fid, pen, out.next);
        if (!std::isfinite(phi_next))
            throw std::runtime_error(std::string(name) + ": non-finite objective at iteration " + std::to_string(k));

        const auto increment = subtract(x, out.next);
        IterationRecord rec;
        rec.k = k;
        rec.objective = phi_next;
        rec.residual = phi_next - reference;
        const double base = norm2(x);
        rec.relative_change = base > 0.0 ? norm2(increment) / base : norm2(increment);
        rec.tau = out.tau;
        rec.inner = out.inner;
        rec.modular_increment = modular_rho(increment, p_trace);
        rec.descent_surrogate = pen.value(x) - pen.value(out.next) + dot(grad, increment);
        if (cfg.record_timing) rec.wall_time = std::chrono::duration<double>(clock::now() - start).count();
        trace.records.push_back(rec);

        if (out.capped && !warned_cap) {
            trace.warnings.push_back("inner loop cap reached at iteration " + std::to_string(k) +
                                     "; step accepted with rho(x^k - x^{k+1}) >= 1");
            warned_cap = true;
        }

        if (phi_next > phi + 1e-12 * std::max(1.0, std::abs(phi))) {
            if (++violations >= cfg.max_descent_violations) {
                trace.aborted = true;
                trace.warnings.push_back("objective increased for " + std::to_string(violations) +
                                         " consecutive iterations; aborting at iteration " + std::to_string(k));
                x = std::move(out.next);
                break;
            }
        } else {
            violations = 0;
        }

        const bool done = stop_check(cfg.stop, x, out.next, phi_next);
        x = std::move(out.next);
        phi = phi_next;
        if (done) {
            trace.converged = true;
            break;
        }
    }
    return {Signal(std::move(x), x0.shape()), std::move(trace)};
}

}  // namespace

SolveResult solve_alg1(const FidelitySpec& fid, const PenaltySpec& pen, const ExponentMap& p,
                       const SolverConfig& cfg, const Signal& x0) {
    check_exponent_range(p, x0.size(), "solve_alg1");
    const StepFn step = [&](std::span<const double> x, std::span<const double> grad) {
        StepOutcome out;
        double tau = cfg.tau0;
        for (int i = 0;; ++i) {
            out.next = prox_step_alg1(x, grad, tau, pen.lambda, p);
            out.tau = tau;
            out.inner = i;
            if (modular_rho(subtract(x, out.next), p) < 1.0) break;
            if (i >= cfg.max_inner || tau * cfg.backtrack_rho < cfg.tau_min) {
                out.capped = true;
                break;
            }
            tau *= cfg.backtrack_rho;
        }
        return out;
    };
    return run("alg1", fid, pen, p, cfg, x0, step);
}

SolveResult solve_alg2(const FidelitySpec& fid, const PenaltySpec& pen, const ExponentMap& p,
                       const SolverConfig& cfg, const Signal& x0) {
    check_exponent_range(p, x0.size(), "solve_alg2");
    const StepFn step = [&](std::span<const double> x, std::span<const double> grad) {
        return StepOutcome{prox_step_alg2(x, grad, cfg.tau0, pen.lambda, p, cfg.scale_by_p), cfg.tau0, 0, false};
    };
    return run("alg2", fid, pen, p, cfg, x0, step);
}

SolveResult solve_ista(const FidelitySpec& fid, const PenaltySpec& pen, const SolverConfig& cfg,
                       const Signal& x0) {
    if (!fid.is_quadratic()) throw std::invalid_argument("solve_ista: fidelity must be quadratic (q = 2)");
    const auto p2 = ExponentMap::constant(x0.size(), 2.0);
    const StepFn step = [&](std::span<const double> x, std::span<const double> grad) {
        return StepOutcome{prox_step_ista(x, grad, cfg.tau0, pen.lambda), cfg.tau0, 0, false};
    };
    return run("ista", fid, pen, p2, cfg, x0, step);
}

namespace {

void check_constant_exponent(double p, const char* solver) {
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument(std::string(solver) + ": p must lie in (1, 2]");
}

}  // namespace

SolveResult solve_bredies_lp(const FidelitySpec& fid, const PenaltySpec& pen, double p_const,
                             const SolverConfig& cfg, const Signal& x0) {
    check_constant_exponent(p_const, "solve_bredies_lp");
    const auto p = ExponentMap::constant(x0.size(), p_const);
    const StepFn step = [&](std::span<const double> x, std::span<const double> grad) {
        return StepOutcome{prox_step_alg1(x, grad, cfg.tau0, pen.lambda, p), cfg.tau0, 0, false};
    };
    return run("bredies", fid, pen, p, cfg, x0, step);
}

SolveResult solve_guansong_lp(const FidelitySpec& fid, const PenaltySpec& pen, double p_const,
                              const SolverConfig& cfg, const Signal& x0) {
    check_constant_exponent(p_const, "solve_guansong_lp");
    const auto p = ExponentMap::constant(x0.size(), p_const);
    const StepFn step = [&](std::span<const double> x, std::span<const double> grad) {
        return StepOutcome{prox_step_alg2(x, grad, cfg.tau0, pen.lambda, p, cfg.scale_by_p), cfg.tau0, 0, false};
    };
    return run("guansong", fid, pen, p, cfg, x0, step);
}

}  // namespace varexp
