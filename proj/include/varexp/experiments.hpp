#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "varexp/exponent.hpp"
#include "varexp/objectives.hpp"
#include "varexp/operators.hpp"
#include "varexp/signal.hpp"
#include "varexp/solvers.hpp"

namespace varexp {

/// One flag per sample; non-zero marks membership.
using Mask = std::vector<std::uint8_t>;

/// Samples whose column coordinate lies in [lo, hi) as a fraction of the width.
Mask column_band_mask(Shape shape, double lo, double hi);
Mask complement(const Mask& m);
std::size_t mask_count(const Mask& m);

struct SpikeParams {
    std::size_t count = 10;
    double amp_lo = 0.5;
    double amp_hi = 1.0;
    /// Random sign per spike when set; otherwise all positive.
    bool signed_amplitudes = false;
};

struct SmoothParams {
    int bumps = 3;
    double amplitude = 0.6;
    /// Gaussian width as a fraction of the smooth sub-domain length.
    double width = 0.08;
};

/// k spikes at distinct random positions with amplitudes in [amp_lo, amp_hi].
Signal gen_spikes(std::size_t n, const SpikeParams& params, std::uint64_t seed);

/// Spikes on [0, split) and a sum of Gaussian bumps on [split, 1); disjoint supports.
Signal gen_heterogeneous(std::size_t n, double split, const SpikeParams& spikes, const SmoothParams& smooth,
                         std::uint64_t seed);

/// Sparse 2D image of thin sinusoidal filaments plus isolated bright points.
Signal gen_filaments_2d(Shape shape, int filaments, int points, double amplitude, std::uint64_t seed);

struct GaussianNoise {
    double sigma = 0.0;
};

struct SaltPepperNoise {
    double density = 0.0;
    double low = 0.0;
    double high = 1.0;
};

using NoiseModel = std::variant<GaussianNoise, SaltPepperNoise>;

/// Gaussian: adds N(0, sigma^2) to masked samples. Salt & pepper: replaces exactly
/// round(density * |mask|) masked samples, chosen without replacement, by low or high
/// with equal probability.
Signal add_noise(const Signal& y, const NoiseModel& model, const Mask& mask, std::uint64_t seed);

struct TwoLevelBuilder {
    Mask mask;
    double p_lo = 1.5;
    double p_hi = 2.0;
};

/// p_hi where |probe_i| > threshold * max|probe|, dilated by `dilate` samples; p_lo elsewhere.
struct MagnitudeBuilder {
    double threshold = 0.1;
    double p_lo = 1.6;
    double p_hi = 2.0;
    int dilate = 0;
};

using ExponentBuilder = std::variant<TwoLevelBuilder, MagnitudeBuilder>;

ExponentMap build_exponent_map(const Signal& y_or_probe, const ExponentBuilder& builder);

/// Short l2-l1 reconstruction used to shape the magnitude exponent map.
Signal ista_probe(const LinearOperator& op, const Signal& data, double lambda, double tau, int iterations);

struct Metrics {
    double mse = 0.0;
    double psnr = 0.0;
    double support_f1 = 0.0;
    int iterations = 0;
    double wall_time = 0.0;
};

inline constexpr double kSupportThreshold = 1e-3;

/// psnr uses peak = max|x_true|; support is |x| > support_rel * max|x_true|.
Metrics compute_metrics(const Signal& x_hat, const Signal& x_true, const IterateTrace& trace,
                        double support_rel = kSupportThreshold);

// ---------------------------------------------------------------------------
// Experiment description and orchestration.

struct NoiseRegion {
    NoiseModel model;
    double lo = 0.0;  ///< column band [lo, hi)
    double hi = 1.0;
};

struct ExperimentSpec {
    std::string name = "experiment";
    Shape shape = Shape::line(256);
    std::uint64_t seed = 1;

    std::string truth = "spikes";  ///< spikes | heterogeneous | filaments
    SpikeParams spikes;
    double split = 0.5;
    SmoothParams smooth;
    int filaments = 3;
    int points = 6;
    double filament_amplitude = 1.0;

    int kernel_size = 15;
    double kernel_sigma = 2.0;
    Boundary boundary = Boundary::zero;

    std::vector<NoiseRegion> noise;

    std::string exponent_builder = "magnitude";  ///< two_level | magnitude
    double p_lo = 1.6;
    double p_hi = 2.0;
    double mask_lo = 0.0;  ///< p_hi band for two_level
    double mask_hi = 0.5;
    double threshold = 0.1;
    int probe_iters = 50;
    int dilate = 2;

    std::string fidelity = "power";  ///< power | modular
    double q = 2.0;

    std::vector<std::string> solvers = {"ista", "alg1", "alg2", "bredies", "guansong"};
    double p_const = 1.7;
    SolverConfig solver;

    int reference_iters = 20000;
    double rate_eps = 1e-4;
    int rate_max_iters = 500000;

    void validate() const;
};

/// Everything derived deterministically from an ExperimentSpec.
struct Problem {
    Signal truth;
    Signal clean_data;
    Signal data;
    std::shared_ptr<const ConvolutionOperator> op;
    ExponentMap exponent;  ///< variable exponent on the signal domain
};

Problem make_problem(const ExperimentSpec& spec);

/// Fidelity a given solver minimizes: the shared power-norm term, or the modular
/// term rho_{p}(Ax - y) with that solver's own exponent.
FidelitySpec fidelity_for(const ExperimentSpec& spec, const Problem& problem, const std::string& solver);

struct SolverRun {
    std::string solver;
    SolveResult result;
    Metrics metrics;
};

/// Runs one of ista | alg1 | alg2 | bredies | guansong from x0 = 0.
SolverRun run_solver(const ExperimentSpec& spec, const Problem& problem, const std::string& solver,
                     const SolverConfig& cfg);

std::vector<SolverRun> run_reconstructions(const ExperimentSpec& spec, const Problem& problem);

struct RateCurve {
    SolverRun run;
    double slope = 0.0;  ///< least-squares slope of log r_k vs log k over the tail half
    bool slope_valid = false;
};

struct RateReport {
    double reference_objective = 0.0;
    int reference_iterations = 0;
    std::vector<RateCurve> curves;

    const RateCurve& curve(const std::string& solver) const;
};

/// Log-log slope of positive residuals over iterations [K/2, K].
bool loglog_tail_slope(const IterateTrace& trace, double& slope);

/// Runs the long ISTA reference, then every solver with the objective-gap stop rule.
RateReport run_rate_study(const ExperimentSpec& spec);

}  // namespace varexp
