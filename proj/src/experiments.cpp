#include "varexp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "varexp/thresholding.hpp"

namespace varexp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Derived seeds keep the truth, each noise band and the operator probe independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return seed * 0x9E3779B97F4A7C15ULL + stream * 0xBF58476D1CE4E5B9ULL + 1;
}

// First k entries of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

Mask column_band_mask(Shape shape, double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw std::invalid_argument("column band must satisfy 0 <= lo <= hi <= 1");
    Mask m(shape.size(), 0);
    const double cols = static_cast<double>(shape.cols);
    for (std::size_t r = 0; r < shape.rows; ++r)
        for (std::size_t c = 0; c < shape.cols; ++c) {
            const double pos = static_cast<double>(c) / cols;
            m[r * shape.cols + c] = (pos >= lo && (pos < hi || hi == 1.0)) ? 1 : 0;
        }
    return m;
}

Mask complement(const Mask& m) {
    Mask out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 0 : 1;
    return out;
}

std::size_t mask_count(const Mask& m) {
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](std::uint8_t v) { return v != 0; }));
}

Signal gen_spikes(std::size_t n, const SpikeParams& params, std::uint64_t seed) {
    if (params.count > n) throw std::invalid_argument("gen_spikes: more spikes than samples");
    if (params.amp_lo > params.amp_hi) throw std::invalid_argument("gen_spikes: empty amplitude range");
    std::mt19937_64 rng(seed);
    std::vector<double> x(n, 0.0);
    std::uniform_real_distribution<double> amp(params.amp_lo, params.amp_hi);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t pos : choose_distinct(n, params.count, rng)) {
        double a = amp(rng);
        if (params.signed_amplitudes && coin(rng)) a = -a;
        x[pos] = a;
    }
    return Signal(std::move(x));
}

Signal gen_heterogeneous(std::size_t n, double split, const SpikeParams& spikes, const SmoothParams& smooth,
                         std::uint64_t seed) {
    if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("gen_heterogeneous: split must lie in (0, 1)");
    const auto n_spikes = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
    if (n_spikes == 0 || n_spikes >= n) throw std::invalid_argument("gen_heterogeneous: sub-domains overlap or are empty");

    std::vector<double> x(n, 0.0);
    const auto left = gen_spikes(n_spikes, spikes, derive_seed(seed, 1));
    std::copy(left.values().begin(), left.values().end(), x.begin());

    const std::size_t len = n - n_spikes;
    const double width = std::max(1.0, smooth.width * static_cast<double>(len));
    const double margin = std::min(3.0 * width, 0.4 * static_cast<double>(len));
    std::mt19937_64 rng(derive_seed(seed, 2));
    std::uniform_real_distribution<double> center(margin, static_cast<double>(len) - margin);
    std::uniform_real_distribution<double> weight(0.5, 1.0);
    std::vector<double> bump(len, 0.0);
    for (int b = 0; b < smooth.bumps; ++b) {
        const double c = center(rng), w = weight(rng);
        for (std::size_t i = 0; i < len; ++i) {
            const double d = (static_cast<double>(i) - c) / width;
            bump[i] += w * std::exp(-0.5 * d * d);
        }
    }
    const double peak = norm_inf(bump);
    if (peak > 0.0)
        for (std::size_t i = 0; i < len; ++i) x[n_spikes + i] = smooth.amplitude * bump[i] / peak;
    return Signal(std::move(x));
}

Signal gen_filaments_2d(Shape shape, int filaments, int points, double amplitude, std::uint64_t seed) {
    if (!shape.is_2d()) throw std::invalid_argument("gen_filaments_2d: needs a 2D shape");
    std::mt19937_64 rng(seed);
    std::vector<double> img(shape.size(), 0.0);
    const double rows = static_cast<double>(shape.rows), cols = static_cast<double>(shape.cols);
    std::uniform_real_distribution<double> row0(0.2 * rows, 0.8 * rows);
    std::uniform_real_distribution<double> swing(0.05 * rows, 0.2 * rows);
    std::uniform_real_distribution<double> period(0.5 * cols, 1.5 * cols);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> level(0.6, 1.0);
    for (int f = 0; f < filaments; ++f) {
        const double r0 = row0(rng), a = swing(rng), per = period(rng), ph = phase(rng), v = level(rng);
        for (std::size_t c = 0; c < shape.cols; ++c) {
            const double r = r0 + a * std::sin(2.0 * kPi * static_cast<double>(c) / per + ph);
            const auto ri = static_cast<long>(std::lround(r));
            if (ri >= 0 && ri < static_cast<long>(shape.rows))
                img[static_cast<std::size_t>(ri) * shape.cols + c] = amplitude * v;
        }
    }
    for (std::size_t pos : choose_distinct(shape.size(), static_cast<std::size_t>(std::max(points, 0)), rng))
        img[pos] = amplitude * level(rng);
    return Signal(std::move(img), shape);
}

Signal add_noise(const Signal& y, const NoiseModel& model, const Mask& mask, std::uint64_t seed) {
    require_same_length(mask.size(), y.size(), "add_noise mask");
    std::mt19937_64 rng(seed);
    std::vector<double> out = y.vector();
    if (const auto* g = std::get_if<GaussianNoise>(&model)) {
        if (!(g->sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be >= 0");
        if (g->sigma == 0.0) return y;
        std::normal_distribution<double> normal(0.0, g->sigma);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (mask[i]) out[i] += normal(rng);
        return Signal(std::move(out), y.shape());
    }
    const auto& sp = std::get<SaltPepperNoise>(model);
    if (!(sp.density >= 0.0 && sp.density <= 1.0)) throw std::invalid_argument("add_noise: density must lie in [0, 1]");
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) candidates.push_back(i);
    const auto count = static_cast<std::size_t>(std::llround(sp.density * static_cast<double>(candidates.size())));
    std::bernoulli_distribution coin(0.5);
    for (std::size_t j : choose_distinct(candidates.size(), count, rng))
        out[candidates[j]] = coin(rng) ? sp.high : sp.low;
    return Signal(std::move(out), y.shape());
}

ExponentMap build_exponent_map(const Signal& y_or_probe, const ExponentBuilder& builder) {
    if (y_or_probe.empty()) throw std::invalid_argument("build_exponent_map: empty domain");
    const auto check_levels = [](double lo, double hi) {
        if (!(lo > 1.0 && lo < hi && hi <= 2.0))
            throw std::invalid_argument("build_exponent_map: need 1 < p_lo < p_hi <= 2");
    };
    std::vector<double> p(y_or_probe.size());
    if (const auto* two = std::get_if<TwoLevelBuilder>(&builder)) {
        check_levels(two->p_lo, two->p_hi);
        require_same_length(two->mask.size(), p.size(), "two_level mask");
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = two->mask[i] ? two->p_hi : two->p_lo;
        return ExponentMap(std::move(p));
    }
    const auto& mag = std::get<MagnitudeBuilder>(builder);
    check_levels(mag.p_lo, mag.p_hi);
    const double thr = mag.threshold * norm_inf(y_or_probe.values());
    const Shape shape = y_or_probe.shape();
    Mask hot(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) hot[i] = std::abs(y_or_probe[i]) > thr ? 1 : 0;
    Mask grown = hot;
    const long d = std::max(mag.dilate, 0);
    if (d > 0) {
        const long rows = static_cast<long>(shape.rows), cols = static_cast<long>(shape.cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                if (!hot[static_cast<std::size_t>(r * cols + c)]) continue;
                for (long dr = (shape.is_2d() ? -d : 0); dr <= (shape.is_2d() ? d : 0); ++dr)
                    for (long dc = -d; dc <= d; ++dc) {
                        const long rr = r + dr, cc = c + dc;
                        if (rr >= 0 && rr < rows && cc >= 0 && cc < cols)
                            grown[static_cast<std::size_t>(rr * cols + cc)] = 1;
                    }
            }
    }
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = grown[i] ? mag.p_hi : mag.p_lo;
    return ExponentMap(std::move(p));
}

Signal ista_probe(const LinearOperator& op, const Signal& data, double lambda, double tau, int iterations) {
    // Non-owning view of op; the fidelity does not outlive this call.
    std::shared_ptr<const LinearOperator> view(&op, [](const LinearOperator*) {});
    const auto fid = FidelitySpec::power_norm(view, data, 2.0);
    SolverConfig cfg;
    cfg.tau0 = tau;
    cfg.tau_min = tau;
    cfg.lambda = lambda;
    cfg.max_iters = iterations;
    cfg.stop = StopRule::relative_change(std::numeric_limits<double>::min());
    cfg.record_timing = false;
    cfg.max_descent_violations = std::numeric_limits<int>::max();
    return solve_ista(fid, cfg.penalty(), cfg, Signal::zeros(op.input_shape())).x;
}

Metrics compute_metrics(const Signal& x_hat, const Signal& x_true, const IterateTrace& trace, double support_rel) {
    require_same_length(x_hat.size(), x_true.size(), "compute_metrics");
    Metrics m;
    const std::size_t n = x_true.size();
    double se = 0.0;
    for (std::size_t i = 0; i < n; ++i) se += (x_hat[i] - x_true[i]) * (x_hat[i] - x_true[i]);
    m.mse = n ? se / static_cast<double>(n) : 0.0;
    double peak = norm_inf(x_true.values());
    if (peak == 0.0) peak = 1.0;
    m.psnr = m.mse > 0.0 ? 10.0 * std::log10(peak * peak / m.mse) : std::numeric_limits<double>::infinity();

    const double thr = support_rel * norm_inf(x_true.values());
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool est = std::abs(x_hat[i]) > thr, truth = std::abs(x_true[i]) > thr;
        tp += est && truth;
        fp += est && !truth;
        fn += !est && truth;
    }
    m.support_f1 = (tp + fp + fn == 0) ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    m.iterations = trace.iterations();
    m.wall_time = trace.wall_time();
    return m;
}

void ExperimentSpec::validate() const {
    if (shape.size() == 0) throw std::invalid_argument("experiment: empty domain");
    if (truth != "spikes" && truth != "heterogeneous" && truth != "filaments")
        throw std::invalid_argument("experiment: unknown truth generator '" + truth + "'");
    if (truth == "filaments" && !shape.is_2d()) throw std::invalid_argument("experiment: filaments need a 2D shape");
    if (truth != "filaments" && shape.is_2d())
        throw std::invalid_argument("experiment: '" + truth + "' is one-dimensional");
    if (exponent_builder != "two_level" && exponent_builder != "magnitude")
        throw std::invalid_argument("experiment: unknown exponent builder '" + exponent_builder + "'");
    if (!(p_lo > 1.0 && p_lo < p_hi && p_hi <= 2.0)) throw std::invalid_argument("experiment: need 1 < p_lo < p_hi <= 2");
    if (fidelity != "power" && fidelity != "modular")
        throw std::invalid_argument("experiment: fidelity must be 'power' or 'modular'");
    if (!(p_const > 1.0 && p_const <= 2.0)) throw std::invalid_argument("experiment: p_const must lie in (1, 2]");
    for (const auto& s : solvers)
        if (s != "ista" && s != "alg1" && s != "alg2" && s != "bredies" && s != "guansong")
            throw std::invalid_argument("experiment: unknown solver '" + s + "'");
    for (const auto& nr : noise)
        if (!(nr.lo >= 0.0 && nr.lo <= nr.hi && nr.hi <= 1.0))
            throw std::invalid_argument("experiment: noise band outside [0, 1]");
    solver.validate();
}

Problem make_problem(const ExperimentSpec& spec) {
    spec.validate();
    Problem pb;
    if (spec.truth == "spikes")
        pb.truth = gen_spikes(spec.shape.size(), spec.spikes, spec.seed);
    else if (spec.truth == "heterogeneous")
        pb.truth = gen_heterogeneous(spec.shape.size(), spec.split, spec.spikes, spec.smooth, spec.seed);
    else
        pb.truth = gen_filaments_2d(spec.shape, spec.filaments, spec.points, spec.filament_amplitude, spec.seed);

    auto kernel = gaussian_kernel(spec.kernel_size, spec.kernel_sigma);
    pb.op = std::make_shared<ConvolutionOperator>(spec.shape, std::move(kernel), spec.boundary);
    pb.clean_data = Signal(pb.op->apply(pb.truth.values()), spec.shape);

    pb.data = pb.clean_data;
    for (std::size_t i = 0; i < spec.noise.size(); ++i) {
        const auto& nr = spec.noise[i];
        pb.data = add_noise(pb.data, nr.model, column_band_mask(spec.shape, nr.lo, nr.hi), derive_seed(spec.seed, 10 + i));
    }

    if (spec.exponent_builder == "two_level") {
        pb.exponent = build_exponent_map(
            pb.data, TwoLevelBuilder{column_band_mask(spec.shape, spec.mask_lo, spec.mask_hi), spec.p_lo, spec.p_hi});
    } else {
        const auto probe = ista_probe(*pb.op, pb.data, spec.solver.lambda, spec.solver.tau0, spec.probe_iters);
        pb.exponent = build_exponent_map(probe, MagnitudeBuilder{spec.threshold, spec.p_lo, spec.p_hi, spec.dilate});
    }
    return pb;
}

FidelitySpec fidelity_for(const ExperimentSpec& spec, const Problem& problem, const std::string& solver) {
    if (spec.fidelity == "power") return FidelitySpec::power_norm(problem.op, problem.data, spec.q);
    const std::size_t m = problem.data.size();
    if (solver == "ista") return FidelitySpec::modular(problem.op, problem.data, ExponentMap::constant(m, 2.0));
    if (solver == "alg1" || solver == "alg2") return FidelitySpec::modular(problem.op, problem.data, problem.exponent);
    return FidelitySpec::modular(problem.op, problem.data, ExponentMap::constant(m, spec.p_const));
}

SolverRun run_solver(const ExperimentSpec& spec, const Problem& problem, const std::string& solver,
                     const SolverConfig& cfg) {
    const auto fid = fidelity_for(spec, problem, solver);
    const auto pen = cfg.penalty();
    const auto x0 = Signal::zeros(spec.shape);
    SolveResult res;
    if (solver == "ista")
        res = solve_ista(fid, pen, cfg, x0);
    else if (solver == "alg1")
        res = solve_alg1(fid, pen, problem.exponent, cfg, x0);
    else if (solver == "alg2")
        res = solve_alg2(fid, pen, problem.exponent, cfg, x0);
    else if (solver == "bredies")
        res = solve_bredies_lp(fid, pen, spec.p_const, cfg, x0);
    else if (solver == "guansong")
        res = solve_guansong_lp(fid, pen, spec.p_const, cfg, x0);
    else
        throw std::invalid_argument("unknown solver '" + solver + "'");
    auto metrics = compute_metrics(res.x, problem.truth, res.trace);
    return {solver, std::move(res), metrics};
}

std::vector<SolverRun> run_reconstructions(const ExperimentSpec& spec, const Problem& problem) {
    std::vector<SolverRun> runs;
    runs.reserve(spec.solvers.size());
    for (const auto& s : spec.solvers) runs.push_back(run_solver(spec, problem, s, spec.solver));
    return runs;
}

const RateCurve& RateReport::curve(const std::string& solver) const {
    for (const auto& c : curves)
        if (c.run.solver == solver) return c;
    throw std::out_of_range("rate report has no solver '" + solver + "'");
}

bool loglog_tail_slope(const IterateTrace& trace, double& slope) {
    const int total = trace.iterations();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int k = std::max(1, total / 2); k <= total; ++k) {
        const auto& rec = trace.records[static_cast<std::size_t>(k - 1)];
        if (!(rec.residual > 0.0)) continue;
        const double lx = std::log(static_cast<double>(rec.k)), ly = std::log(rec.residual);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 2 || !(denom > 0.0)) return false;
    slope = (count * sxy - sx * sy) / denom;
    return std::isfinite(slope);
}

RateReport run_rate_study(const ExperimentSpec& spec) {
    if (spec.fidelity != "power" || spec.q != 2.0)
        throw std::invalid_argument("rate study: needs the power fidelity with q = 2");
    const auto problem = make_problem(spec);

    RateReport report;
    SolverConfig ref_cfg = spec.solver;
    ref_cfg.max_iters = spec.reference_iters;
    ref_cfg.stop = StopRule::relative_change(std::numeric_limits<double>::min());
    ref_cfg.record_timing = false;
    const auto reference = run_solver(spec, problem, "ista", ref_cfg);
    // Converged when the objective moved by less than the study tolerance
    // over the second half of the reference run.
    const auto& recs = reference.result.trace.records;
    const bool settled = recs.size() >= 2 && [&] {
        const double late = recs.back().objective, mid = recs[recs.size() / 2].objective;
        return std::abs(mid - late) <= spec.rate_eps * std::abs(late);
    }();
    if (!settled || reference.result.trace.aborted)
        throw std::runtime_error("rate study: reference ISTA run failed to converge");
    report.reference_objective = reference.result.trace.final_objective();
    report.reference_iterations = reference.result.trace.iterations();

    SolverConfig cfg = spec.solver;
    cfg.stop = StopRule::objective_gap(spec.rate_eps, report.reference_objective);
    cfg.max_iters = spec.rate_max_iters;
    for (const auto& s : spec.solvers) {
        RateCurve curve{run_solver(spec, problem, s, cfg)};
        curve.slope_valid = curve.run.result.trace.converged && loglog_tail_slope(curve.run.result.trace, curve.slope);
        report.curves.push_back(std::move(curve));
    }
    return report;
}

}  // namespace varexp
