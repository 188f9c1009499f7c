#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "varexp/experiments.hpp"

using namespace varexp;

namespace {

std::size_t nonzeros(const Signal& s) {
    std::size_t n = 0;
    for (double v : s.values()) n += v != 0.0;
    return n;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("masks") {
    const auto m = column_band_mask(Shape::line(10), 0.0, 0.5);
    CHECK(mask_count(m) == 5);
    CHECK(m[4] == 1);
    CHECK(m[5] == 0);
    const auto c = complement(m);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] + c[i] == 1);
    const auto g = column_band_mask(Shape::grid(3, 4), 0.5, 1.0);
    CHECK(mask_count(g) == 6);
    CHECK(g[2] == 1);
    CHECK(g[1] == 0);
}

TEST_CASE("spikes") {
    SpikeParams p;
    p.count = 0;
    CHECK(nonzeros(gen_spikes(50, p, 1)) == 0);
    p.count = 12;
    const auto s = gen_spikes(100, p, 3);
    CHECK(nonzeros(s) == 12);
    for (double v : s.values())
        if (v != 0.0) CHECK((v >= p.amp_lo && v <= p.amp_hi));
    CHECK(gen_spikes(100, p, 3).vector() == s.vector());
    CHECK(gen_spikes(100, p, 4).vector() != s.vector());
    p.signed_amplitudes = true;
    p.count = 100;
    const auto all = gen_spikes(100, p, 5);
    CHECK(nonzeros(all) == 100);
    bool neg = false;
    for (double v : all.values()) neg |= v < 0;
    CHECK(neg);
    p.count = 101;
    CHECK_THROWS_AS(gen_spikes(100, p, 1), std::invalid_argument);
}

TEST_CASE("heterogeneous signal") {
    SpikeParams sp;
    sp.count = 5;
    SmoothParams sm;
    sm.amplitude = 0.6;
    const auto s = gen_heterogeneous(200, 0.5, sp, sm, 9);
    std::size_t left = 0;
    for (std::size_t i = 0; i < 100; ++i) left += s[i] != 0.0;
    CHECK(left == 5);
    double right_max = 0, right_nz = 0;
    for (std::size_t i = 100; i < 200; ++i) right_max = std::max(right_max, std::abs(s[i])), right_nz += s[i] != 0.0;
    CHECK(right_max <= 0.6 + 1e-12);
    CHECK(right_nz > 50);
    CHECK(gen_heterogeneous(200, 0.5, sp, sm, 9).vector() == s.vector());
    CHECK_THROWS_AS(gen_heterogeneous(200, 0.0, sp, sm, 9), std::invalid_argument);
    CHECK_THROWS_AS(gen_heterogeneous(200, 1.0, sp, sm, 9), std::invalid_argument);
    sp.count = 150;
    CHECK_THROWS_AS(gen_heterogeneous(200, 0.5, sp, sm, 9), std::invalid_argument);
}

TEST_CASE("filaments") {
    const auto f = gen_filaments_2d(Shape::grid(32, 40), 3, 5, 1.0, 2);
    CHECK(f.shape() == Shape::grid(32, 40));
    CHECK(nonzeros(f) > 5);
    CHECK(norm_inf(f.values()) <= 1.0 + 1e-12);
    CHECK(gen_filaments_2d(Shape::grid(32, 40), 3, 5, 1.0, 2).vector() == f.vector());
    CHECK_THROWS_AS(gen_filaments_2d(Shape::line(40), 3, 5, 1.0, 2), std::invalid_argument);
}

TEST_CASE("noise models") {
    const Signal y(std::vector<double>(200, 0.25));
    const auto all = column_band_mask(Shape::line(200), 0, 1);
    CHECK(add_noise(y, GaussianNoise{0.0}, all, 1).vector() == y.vector());
    CHECK(add_noise(y, SaltPepperNoise{0.0, 0, 1}, all, 1).vector() == y.vector());
    for (double density : {0.1, 0.33, 0.5, 1.0}) {
        const auto left = column_band_mask(Shape::line(200), 0, 0.3);
        const auto z = add_noise(y, SaltPepperNoise{density, -1, 1}, left, 7);
        std::size_t changed = 0, outside = 0;
        for (std::size_t i = 0; i < 200; ++i) {
            changed += z[i] != 0.25;
            outside += !left[i] && z[i] != 0.25;
            if (z[i] != 0.25) CHECK((z[i] == -1.0 || z[i] == 1.0));
        }
        CHECK(changed == static_cast<std::size_t>(std::lround(density * 60)));
        CHECK(outside == 0);
    }
    const auto left = column_band_mask(Shape::line(200), 0, 0.5);
    const auto g = add_noise(y, GaussianNoise{0.1}, left, 3);
    double var = 0;
    for (std::size_t i = 0; i < 100; ++i) var += (g[i] - 0.25) * (g[i] - 0.25);
    CHECK(var / 100 == doctest::Approx(0.01).epsilon(0.5));
    for (std::size_t i = 100; i < 200; ++i) CHECK(g[i] == 0.25);
    CHECK_THROWS_AS(add_noise(y, SaltPepperNoise{1.5, 0, 1}, all, 1), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(y, SaltPepperNoise{-0.1, 0, 1}, all, 1), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(y, GaussianNoise{-1}, all, 1), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(y, GaussianNoise{0.1}, Mask(10, 1), 1), std::invalid_argument);
}

TEST_CASE("exponent builders") {
    const Signal probe({0.0, 0.05, 1.0, 0.2, 0.0, 0.0, 0.5});
    const auto ones = build_exponent_map(probe, TwoLevelBuilder{Mask(7, 1), 1.4, 2.0});
    CHECK(ones.is_constant());
    CHECK(ones.p_plus() == 2.0);
    const auto inf = build_exponent_map(probe, MagnitudeBuilder{HUGE_VAL, 1.6, 2.0, 0});
    CHECK(inf.is_constant());
    CHECK(inf.p_minus() == 1.6);
    const auto mag = build_exponent_map(probe, MagnitudeBuilder{0.1, 1.6, 2.0, 0});
    CHECK(std::vector<double>(mag.values().begin(), mag.values().end()) ==
          std::vector<double>{1.6, 1.6, 2.0, 2.0, 1.6, 1.6, 2.0});
    const auto dil = build_exponent_map(probe, MagnitudeBuilder{0.6, 1.6, 2.0, 1});
    CHECK(std::vector<double>(dil.values().begin(), dil.values().end()) ==
          std::vector<double>{1.6, 2.0, 2.0, 2.0, 1.6, 1.6, 1.6});
    CHECK_THROWS_AS(build_exponent_map(Signal(), TwoLevelBuilder{{}, 1.4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_exponent_map(probe, TwoLevelBuilder{Mask(7, 1), 2.0, 1.4}), std::invalid_argument);
    CHECK_THROWS_AS(build_exponent_map(probe, TwoLevelBuilder{Mask(7, 1), 1.4, 2.2}), std::invalid_argument);
    CHECK_THROWS_AS(build_exponent_map(probe, TwoLevelBuilder{Mask(6, 1), 1.4, 2.0}), std::invalid_argument);
}

TEST_CASE("metrics") {
    const Signal truth({0, 1, 0, -0.5, 0});
    const IterateTrace empty;
    const auto same = compute_metrics(truth, truth, empty);
    CHECK(same.mse == 0.0);
    CHECK(same.support_f1 == 1.0);
    const auto zero = compute_metrics(Signal::zeros(Shape::line(5)), truth, empty);
    CHECK(zero.support_f1 == 0.0);
    CHECK(zero.mse == doctest::Approx(1.25 / 5));
    CHECK(std::isfinite(zero.psnr));
    oracle::Rng rng(4);
    const auto a = oracle::uni_vec(rng, 50, -1, 1), b = oracle::uni_vec(rng, 50, -1, 1);
    double se = 0, peak = 0;
    for (std::size_t i = 0; i < 50; ++i) se += (a[i] - b[i]) * (a[i] - b[i]), peak = std::max(peak, std::abs(b[i]));
    const auto m = compute_metrics(Signal(a), Signal(b), empty);
    CHECK(m.mse == doctest::Approx(se / 50).epsilon(1e-13));
    CHECK(m.psnr == doctest::Approx(10 * std::log10(peak * peak / (se / 50))).epsilon(1e-12));
    // a missed spike plus a false one: tp 1, fp 1, fn 1
    const auto f1 = compute_metrics(Signal({0, 1, 0.3, 0, 0}), truth, empty);
    CHECK(f1.support_f1 == doctest::Approx(0.5));
    CHECK_THROWS_AS(compute_metrics(Signal({1, 2}), truth, empty), std::invalid_argument);
}

TEST_CASE("experiment spec validation") {
    ExperimentSpec s;
    CHECK_NOTHROW(s.validate());
    s.truth = "stars";
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.p_lo = 2.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.solvers = {"ista", "fista"};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.shape = Shape::grid(8, 8);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.truth = "filaments";
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("problem construction is deterministic") {
    ExperimentSpec s;
    s.shape = Shape::line(64);
    s.spikes.count = 4;
    s.kernel_size = 7;
    s.noise.push_back({GaussianNoise{0.01}, 0, 1});
    s.solver.lambda = 0.01;
    const auto a = make_problem(s), b = make_problem(s);
    CHECK(a.data.vector() == b.data.vector());
    CHECK(a.exponent.values()[0] == b.exponent.values()[0]);
    s.seed = 2;
    CHECK(make_problem(s).data.vector() != a.data.vector());
}

TEST_CASE("fidelity per solver") {
    ExperimentSpec s;
    s.shape = Shape::line(32);
    s.spikes.count = 3;
    s.kernel_size = 5;
    s.fidelity = "modular";
    s.exponent_builder = "two_level";
    s.p_lo = 1.4;
    const auto pb = make_problem(s);
    CHECK(fidelity_for(s, pb, "ista").is_quadratic());
    const auto alg = fidelity_for(s, pb, "alg2");
    const auto& mod = std::get<ModularFidelity>(alg.kind());
    CHECK(mod.p.p_minus() == 1.4);
    const auto gs = fidelity_for(s, pb, "guansong");
    CHECK(std::get<ModularFidelity>(gs.kind()).p.is_constant());
    CHECK_THROWS_AS(run_solver(s, pb, "fista", s.solver), std::invalid_argument);
}

TEST_CASE("tail slope fit") {
    IterateTrace t;
    for (int k = 1; k <= 200; ++k) {
        IterationRecord r;
        r.k = k;
        r.residual = 3.0 * std::pow(k, -1.5);
        t.records.push_back(r);
    }
    double slope = 0;
    REQUIRE(loglog_tail_slope(t, slope));
    CHECK(slope == doctest::Approx(-1.5).epsilon(1e-10));
    IterateTrace tiny;
    CHECK_FALSE(loglog_tail_slope(tiny, slope));
}

TEST_CASE("rate study guards") {
    ExperimentSpec s;
    s.fidelity = "modular";
    CHECK_THROWS_AS(run_rate_study(s), std::invalid_argument);
    s = {};
    s.shape = Shape::line(48);
    s.spikes.count = 3;
    s.kernel_size = 7;
    s.solver.lambda = 0.01;
    s.reference_iters = 3;  // far too short to settle
    CHECK_THROWS_AS(run_rate_study(s), std::runtime_error);
}

TEST_CASE("p = 2 rate study: all trajectories coincide") {
    ExperimentSpec s;
    s.shape = Shape::line(64);
    s.spikes.count = 4;
    s.kernel_size = 7;
    s.kernel_sigma = 1.0;
    s.noise.push_back({GaussianNoise{0.01}, 0, 1});
    s.p_lo = 1.999999;
    s.p_hi = 2.0;
    s.threshold = -1;  // every sample above threshold: constant p_hi
    s.p_const = 2.0;
    s.solver.lambda = 0.01;
    s.reference_iters = 5000;
    s.solver.record_timing = false;
    const auto rep = run_rate_study(s);
    const auto& ista = rep.curve("ista").run.result.trace;
    for (const char* name : {"alg1", "alg2", "bredies", "guansong"}) {
        const auto& tr = rep.curve(name).run.result.trace;
        REQUIRE(tr.iterations() == ista.iterations());
        for (int k = 0; k < tr.iterations(); ++k)
            CHECK(std::abs(tr.records[k].objective - ista.records[k].objective) <= 1e-12);
    }
    CHECK(rep.curve("ista").slope_valid);
    CHECK(rep.curve("ista").slope < 0);
    CHECK_THROWS_AS(rep.curve("nope"), std::out_of_range);
}

}  // TEST_SUITE
