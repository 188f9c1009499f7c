#include "varexp/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include <fmt/core.h>

#include "varexp/experiments.hpp"
#include "varexp/exponent.hpp"
#include "varexp/objectives.hpp"
#include "varexp/operators.hpp"
#include "varexp/solvers.hpp"
#include "varexp/thresholding.hpp"

namespace varexp {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(rng, -scale, scale);
    return v;
}

ExponentMap random_exponents(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> p(n);
    for (auto& x : p) x = uniform(rng, lo, hi);
    return ExponentMap(std::move(p));
}

double oracle_min(const ScalarFunction& psi, double x, double s, double t) {
    const auto [lo, hi] = convex_bracket(psi, x, oracle_half_width(x, s, t));
    return oracle_argmin_1d(psi, lo, hi, 1e-12);
}

CheckResult check_threshold_oracle(Rng& rng, int tuples) {
    double worst = 0.0;
    for (int i = 0; i < tuples; ++i) {
        const double x = uniform(rng, -5, 5), s = uniform(rng, -2, 2), t = uniform(rng, 0, 2), p = uniform(rng, 1.05, 2);
        const double a1 = t_alg1(x, s, t, p), o1 = oracle_min(psi_alg1(x, s, t, p), x, s, t);
        const double a2 = t_alg2(x, s, t, p), o2 = oracle_min(psi_alg2(x, s, t, p), x, s, t);
        worst = std::max({worst, std::abs(a1 - o1) / std::max(1.0, std::abs(o1)),
                          std::abs(a2 - o2) / std::max(1.0, std::abs(o2))});
    }
    return {"thresholding matches 1D argmin", worst <= 1e-6, fmt::format("max scaled error {:.3e}", worst)};
}

CheckResult check_p2_reduction(Rng& rng, int tuples) {
    double worst = 0.0;
    for (int i = 0; i < tuples; ++i) {
        const double x = uniform(rng, -5, 5), s = uniform(rng, -2, 2), t = uniform(rng, 0, 2);
        const double r = t_ista(x, s, t);
        worst = std::max({worst, std::abs(t_alg1(x, s, t, 2.0) - r), std::abs(t_alg2(x, s, t, 2.0) - r)});
    }
    return {"p = 2 thresholds reduce to soft thresholding", worst <= 1e-12, fmt::format("max error {:.3e}", worst)};
}

CheckResult check_norm_modular(Rng& rng, int vectors) {
    int failures = 0;
    for (int i = 0; i < vectors; ++i) {
        const std::size_t n = 1 + rng() % 64;
        const auto p = random_exponents(rng, n, 1.1, 3.0);
        const auto x = random_vector(rng, n, std::pow(10.0, uniform(rng, -2, 2)));
        const double norm = luxemburg_norm(x, p), rho = modular_rho(x, p);
        const double lo = norm > 1 ? std::pow(norm, p.p_minus()) : std::pow(norm, p.p_plus());
        const double hi = norm > 1 ? std::pow(norm, p.p_plus()) : std::pow(norm, p.p_minus());
        std::vector<double> u(x);
        for (auto& v : u) v /= norm;
        const bool ok = ((norm <= 1) == (rho <= 1 + 1e-9)) && rho >= lo * (1 - 1e-9) && rho <= hi * (1 + 1e-9) &&
                        std::abs(modular_rho(u, p) - 1) <= 1e-9;
        failures += !ok;
    }
    return {"norm-modular unit ball and sandwich bounds", failures == 0, fmt::format("{} failures", failures)};
}

CheckResult check_adjoints(Rng& rng) {
    std::vector<std::unique_ptr<LinearOperator>> ops;
    ops.push_back(std::make_unique<ConvolutionOperator>(Shape::line(97), gaussian_kernel(9, 1.5), Boundary::zero));
    ops.push_back(std::make_unique<ConvolutionOperator>(Shape::line(64), ConvolutionKernel::line({0.1, 0.5, 0.2, 0.2}), Boundary::periodic));
    ops.push_back(std::make_unique<ConvolutionOperator>(Shape::grid(17, 23), gaussian_kernel_2d(5, 1.0), Boundary::zero));
    ops.push_back(std::make_unique<ConvolutionOperator>(Shape::grid(12, 9), ConvolutionKernel::grid({1, 2, 0.5, -1, 3, 0.25}, 2, 3), Boundary::periodic));
    ops.push_back(std::make_unique<MatrixOperator>(MatrixOperator::random_gaussian(30, 40, rng())));
    ops.push_back(std::make_unique<IdentityOperator>(Shape::line(10)));
    double worst = 0.0;
    for (const auto& op : ops) worst = std::max(worst, adjoint_mismatch(*op, 20, rng()));
    return {"operator adjoints", worst <= 1e-10, fmt::format("max relative mismatch {:.3e}", worst)};
}

CheckResult check_gradients(Rng& rng, int instances) {
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const std::size_t n = 8 + rng() % 24;
        auto op = std::make_shared<MatrixOperator>(MatrixOperator::random_gaussian(n, n, rng()));
        const Signal y(random_vector(rng, n, 1.0));
        const auto fid = (i % 2) ? FidelitySpec::modular(op, y, random_exponents(rng, n, 1.2, 2.0))
                                 : FidelitySpec::power_norm(op, y, uniform(rng, 1.2, 2.0));
        auto x = random_vector(rng, n, 1.0);
        const auto g = fid.gradient(x);
        std::vector<double> fd(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
            const double keep = x[j];
            x[j] = keep + h;
            const double fp = fid.value(x);
            x[j] = keep - h;
            const double fm = fid.value(x);
            x[j] = keep;
            fd[j] = (fp - fm) / (2 * h);
        }
        worst = std::max(worst, norm2(subtract(g, fd)) / std::max(1e-12, norm2(g)));
    }
    return {"fidelity gradients vs finite differences", worst <= 1e-5, fmt::format("max relative error {:.3e}", worst)};
}

CheckResult check_descent(std::uint64_t seed, int instances) {
    int failures = 0;
    for (int i = 0; i < instances; ++i) {
        ExperimentSpec spec;
        spec.shape = Shape::line(96);
        spec.seed = seed + static_cast<std::uint64_t>(i);
        spec.spikes.count = 6;
        spec.kernel_size = 9;
        spec.kernel_sigma = 1.5;
        spec.noise.push_back({GaussianNoise{0.01}, 0.0, 1.0});
        spec.solver.lambda = 1e-2;
        spec.solver.max_iters = 300;
        spec.solver.stop = StopRule::relative_change(1e-10);
        spec.solver.record_timing = false;
        const auto pb = make_problem(spec);
        for (const char* s : {"alg1", "alg2"}) {
            const auto run = run_solver(spec, pb, s, spec.solver);
            double prev = run.result.trace.initial_objective;
            for (const auto& r : run.result.trace.records) {
                if (r.objective > prev + 1e-12) ++failures;
                if (std::string(s) == "alg1" && r.modular_increment > r.tau * r.descent_surrogate + 1e-10) ++failures;
                prev = r.objective;
            }
            failures += run.result.trace.aborted;
        }
    }
    return {"monotone descent and modular increment bound", failures == 0, fmt::format("{} violations", failures)};
}

CheckResult check_identities(Rng& rng, int vectors) {
    double sep = 0.0, jr = 0.0, conj = 0.0;
    for (int i = 0; i < vectors; ++i) {
        const std::size_t n = 1 + rng() % 64;
        const auto p = random_exponents(rng, n, 1.1, 2.0);
        const auto x = random_vector(rng, n, 2.0);
        std::vector<double> a(n, 0.0), b(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) (rng() & 1 ? a : b)[j] = x[j];
        sep = std::max(sep, std::abs(modular_rho(x, p) - modular_rho(a, p) - modular_rho(b, p)) /
                                std::max(1.0, modular_rho(x, p)));
        jr = std::max(jr, std::abs(dot(grad_modular_rho_bar(x, p), x) - modular_rho(x, p)) / std::max(1.0, modular_rho(x, p)));
        conj = std::max(conj, std::abs(modular_rho(jmap(x, p), p.conjugate()) - modular_rho(x, p)) /
                                  std::max(1.0, modular_rho(x, p)));
    }
    return {"separability and duality identities", sep <= 1e-12 && jr <= 1e-12 && conj <= 1e-10,
            fmt::format("separability {:.1e}, <J x, x> {:.1e}, conjugate modular {:.1e}", sep, jr, conj)};
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed, int scale) {
    scale = std::max(scale, 1);
    Rng rng(seed);
    std::vector<CheckResult> out;
    const auto guarded = [&](auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({"(check threw)", false, e.what()});
        }
    };
    guarded([&] { return check_threshold_oracle(rng, 1000 * scale); });
    guarded([&] { return check_p2_reduction(rng, 1000 * scale); });
    guarded([&] { return check_norm_modular(rng, 100 * scale); });
    guarded([&] { return check_adjoints(rng); });
    guarded([&] { return check_gradients(rng, 10 * scale); });
    guarded([&] { return check_identities(rng, 100 * scale); });
    guarded([&] { return check_descent(seed, 2 * scale); });
    return out;
}

}  // namespace varexp
