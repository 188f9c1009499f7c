#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "varexp/exponent.hpp"
#include "varexp/operators.hpp"
#include "varexp/signal.hpp"

namespace varexp {

/// f(x) = (1/q) sum |(Ax - y)_i|^q with 1 < q <= 2.
struct PowerNormFidelity {
    double q = 2.0;
};

/// f(x) = rho_{p(.)}(Ax - y), the exponent living on the data side.
struct ModularFidelity {
    ExponentMap p;
};

/// Smooth data term f built from a forward operator and an observation.
class FidelitySpec {
public:
    using Kind = std::variant<PowerNormFidelity, ModularFidelity>;

    static FidelitySpec power_norm(std::shared_ptr<const LinearOperator> op, Signal data, double q = 2.0);
    static FidelitySpec modular(std::shared_ptr<const LinearOperator> op, Signal data, ExponentMap p);

    const Kind& kind() const { return kind_; }
    const LinearOperator& op() const { return *op_; }
    std::shared_ptr<const LinearOperator> op_ptr() const { return op_; }
    const Signal& data() const { return data_; }

    /// True when f is (1/2)||Ax - y||^2 or rho_2(Ax - y) = ||Ax - y||^2.
    bool is_quadratic() const;

    /// Same operator and data with a different data-side exponent (modular kind only).
    FidelitySpec with_exponent(ExponentMap p) const;

    std::vector<double> residual(std::span<const double> x) const;
    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;

private:
    FidelitySpec(std::shared_ptr<const LinearOperator> op, Signal data, Kind kind);

    std::shared_ptr<const LinearOperator> op_;
    Signal data_;
    Kind kind_;
};

/// g(x) = lambda ||x||_1.
struct PenaltySpec {
    double lambda = 0.0;

    explicit PenaltySpec(double lambda_ = 0.0);
    double value(std::span<const double> x) const;
};

double fidelity_value(const FidelitySpec& spec, std::span<const double> x);
std::vector<double> fidelity_gradient(const FidelitySpec& spec, std::span<const double> x);

/// phi(x) = f(x) + g(x)
double objective_value(const FidelitySpec& spec, const PenaltySpec& pen, std::span<const double> x);

}  // namespace varexp
