#include "varexp/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace varexp {

FidelitySpec::FidelitySpec(std::shared_ptr<const LinearOperator> op, Signal data, Kind kind)
    : op_(std::move(op)), data_(std::move(data)), kind_(std::move(kind)) {
    if (!op_) throw std::invalid_argument("FidelitySpec: null operator");
    require_same_length(op_->output_shape().size(), data_.size(), "FidelitySpec data");
}

FidelitySpec FidelitySpec::power_norm(std::shared_ptr<const LinearOperator> op, Signal data, double q) {
    if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("power-norm fidelity needs 1 < q <= 2");
    return FidelitySpec(std::move(op), std::move(data), PowerNormFidelity{q});
}

FidelitySpec FidelitySpec::modular(std::shared_ptr<const LinearOperator> op, Signal data, ExponentMap p) {
    if (op) require_same_length(p.size(), op->output_shape().size(), "modular fidelity exponent");
    return FidelitySpec(std::move(op), std::move(data), ModularFidelity{std::move(p)});
}

bool FidelitySpec::is_quadratic() const {
    if (const auto* pn = std::get_if<PowerNormFidelity>(&kind_)) return pn->q == 2.0;
    const auto& p = std::get<ModularFidelity>(kind_).p;
    return p.p_minus() == 2.0 && p.p_plus() == 2.0;
}

FidelitySpec FidelitySpec::with_exponent(ExponentMap p) const {
    if (!std::holds_alternative<ModularFidelity>(kind_))
        throw std::logic_error("with_exponent: fidelity is not modular");
    return modular(op_, data_, std::move(p));
}

std::vector<double> FidelitySpec::residual(std::span<const double> x) const {
    require_same_length(x.size(), op_->input_shape().size(), "fidelity input");
    auto r = op_->apply(x);
    const auto y = data_.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    return r;
}

double FidelitySpec::value(std::span<const double> x) const {
    const auto r = residual(x);
    if (const auto* pn = std::get_if<PowerNormFidelity>(&kind_)) {
        double s = 0.0;
        if (pn->q == 2.0) {
            for (double v : r) s += v * v;
        } else {
            for (double v : r) s += v == 0.0 ? 0.0 : std::pow(std::abs(v), pn->q);
        }
        return s / pn->q;
    }
    return modular_rho(r, std::get<ModularFidelity>(kind_).p);
}

std::vector<double> FidelitySpec::gradient(std::span<const double> x) const {
    auto r = residual(x);
    if (const auto* pn = std::get_if<PowerNormFidelity>(&kind_)) {
        // J_q^q(r) = (sign(r_i)|r_i|^{q-1})_i
        if (pn->q != 2.0)
            for (double& v : r) v = pointwise_jmap(v, pn->q);
        return op_->adjoint(r);
    }
    return op_->adjoint(grad_modular_rho(r, std::get<ModularFidelity>(kind_).p));
}

PenaltySpec::PenaltySpec(double lambda_) : lambda(lambda_) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("PenaltySpec: lambda must be finite and >= 0");
}

double PenaltySpec::value(std::span<const double> x) const { return lambda == 0.0 ? 0.0 : lambda * norm1(x); }

double fidelity_value(const FidelitySpec& spec, std::span<const double> x) { return spec.value(x); }

std::vector<double> fidelity_gradient(const FidelitySpec& spec, std::span<const double> x) {
    return spec.gradient(x);
}

double objective_value(const FidelitySpec& spec, const PenaltySpec& pen, std::span<const double> x) {
    return spec.value(x) + pen.value(x);
}

}  // namespace varexp
