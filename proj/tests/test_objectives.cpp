#include <doctest.h>

#include <memory>
#include <stdexcept>

#include "oracles.hpp"
#include "varexp/objectives.hpp"

using namespace varexp;

namespace {

std::shared_ptr<const LinearOperator> random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    return std::make_shared<MatrixOperator>(MatrixOperator::random_gaussian(m, n, seed));
}

std::vector<double> central_diff(const FidelitySpec& f, std::vector<double> x) {
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j])), keep = x[j];
        x[j] = keep + h;
        const double fp = f.value(x);
        x[j] = keep - h;
        const double fm = f.value(x);
        x[j] = keep;
        g[j] = (fp - fm) / (2 * h);
    }
    return g;
}

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("factory validation") {
    auto id = std::make_shared<IdentityOperator>(Shape::line(3));
    const Signal y({1, 2, 3});
    CHECK_THROWS_AS(FidelitySpec::power_norm(id, y, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FidelitySpec::power_norm(id, y, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(FidelitySpec::power_norm(id, Signal({1, 2}), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(FidelitySpec::modular(id, y, ExponentMap({1.5, 2})), std::invalid_argument);
    CHECK_THROWS_AS(PenaltySpec(-1.0), std::invalid_argument);
    CHECK(FidelitySpec::power_norm(id, y, 2.0).is_quadratic());
    CHECK_FALSE(FidelitySpec::power_norm(id, y, 1.5).is_quadratic());
    CHECK(FidelitySpec::modular(id, y, ExponentMap::constant(3, 2)).is_quadratic());
    CHECK_FALSE(FidelitySpec::modular(id, y, ExponentMap({2, 2, 1.9})).is_quadratic());
    CHECK_THROWS(FidelitySpec::power_norm(id, y, 2.0).with_exponent(ExponentMap::constant(3, 1.5)));
}

TEST_CASE("fidelity values") {
    auto id = std::make_shared<IdentityOperator>(Shape::line(3));
    const std::vector<double> x{1, -2, 0.5};
    CHECK(FidelitySpec::power_norm(id, Signal(x), 2.0).value(x) == 0.0);
    CHECK(FidelitySpec::modular(id, Signal(x), ExponentMap({1.2, 1.7, 2})).value(x) == 0.0);
    CHECK(FidelitySpec::power_norm(id, Signal::zeros(Shape::line(3)), 2.0).value(x) == doctest::Approx(0.5 * 5.25));
    CHECK_THROWS_AS(FidelitySpec::power_norm(id, Signal(x), 2.0).value(std::vector<double>{1}), std::invalid_argument);

    oracle::Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        auto A = std::make_shared<MatrixOperator>(MatrixOperator::random_gaussian(6, 4, rng()));
        const auto xv = oracle::uni_vec(rng, 4, -1, 1), yv = oracle::uni_vec(rng, 6, -1, 1);
        const auto pv = oracle::uni_vec(rng, 6, 1.1, 2.0);
        const double q = oracle::uni(rng, 1.1, 2.0);
        auto r = A->apply(xv);
        for (std::size_t i = 0; i < 6; ++i) r[i] -= yv[i];
        const double power_ref = oracle::modular(r, std::vector<double>(6, q)) / q;
        CHECK(FidelitySpec::power_norm(A, Signal(yv), q).value(xv) == doctest::Approx(power_ref).epsilon(1e-13));
        CHECK(FidelitySpec::modular(A, Signal(yv), ExponentMap(pv)).value(xv) == doctest::Approx(oracle::modular(r, pv)).epsilon(1e-13));
        const double lam = oracle::uni(rng, 0, 1);
        double l1 = 0;
        for (double v : xv) l1 += std::abs(v);
        CHECK(objective_value(FidelitySpec::power_norm(A, Signal(yv), q), PenaltySpec(lam), xv) ==
              doctest::Approx(power_ref + lam * l1).epsilon(1e-13));
    }
}

TEST_CASE("objective special cases") {
    auto id = std::make_shared<IdentityOperator>(Shape::line(2));
    const auto f = FidelitySpec::power_norm(id, Signal::zeros(Shape::line(2)), 2.0);
    CHECK(objective_value(f, PenaltySpec(0.0), std::vector<double>{3, 4}) == doctest::Approx(12.5));
    CHECK(objective_value(f, PenaltySpec(3.0), std::vector<double>{0, 0}) == 0.0);
    CHECK(PenaltySpec(0.5).value(std::vector<double>{1, -3}) == 2.0);
}

TEST_CASE("gradients") {
    auto id = std::make_shared<IdentityOperator>(Shape::line(3));
    const std::vector<double> x{1, -2, 0.5}, y{0.5, 1, -1};
    const auto g = FidelitySpec::power_norm(id, Signal(y), 2.0).gradient(x);
    for (int i = 0; i < 3; ++i) CHECK(g[i] == doctest::Approx(x[i] - y[i]));
    const auto g0 = FidelitySpec::modular(id, Signal(x), ExponentMap({1.2, 1.5, 2})).gradient(x);
    CHECK(g0 == std::vector<double>{0, 0, 0});

    oracle::Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng() % 10, m = 3 + rng() % 10;
        auto A = random_matrix(m, n, rng());
        const Signal yv(oracle::uni_vec(rng, m, -1, 1));
        const auto xv = oracle::uni_vec(rng, n, -1, 1);
        const FidelitySpec f = (t % 2) ? FidelitySpec::power_norm(A, yv, oracle::uni(rng, 1.2, 2.0))
                                       : FidelitySpec::modular(A, yv, ExponentMap(oracle::uni_vec(rng, m, 1.2, 2.0)));
        const auto ga = f.gradient(xv), gd = central_diff(f, xv);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < n; ++i) num += (ga[i] - gd[i]) * (ga[i] - gd[i]), den += ga[i] * ga[i];
        CHECK(std::sqrt(num / den) <= 1e-5);
        CHECK(fidelity_gradient(f, xv) == ga);
        CHECK(fidelity_value(f, xv) == f.value(xv));
    }
}

}  // TEST_SUITE
