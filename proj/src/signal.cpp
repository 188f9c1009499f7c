#include "varexp/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace varexp {

Signal::Signal(std::vector<double> values) : Signal(std::move(values), Shape{}) {
    shape_ = Shape::line(data_.size());
}

Signal::Signal(std::vector<double> values, Shape shape) : data_(std::move(values)), shape_(shape) {
    if (shape_.cols == 0 && shape_.rows == 1) shape_.cols = data_.size();
    if (shape_.size() != data_.size())
        throw std::invalid_argument("Signal: shape " + std::to_string(shape_.rows) + "x" +
                                    std::to_string(shape_.cols) + " does not match " +
                                    std::to_string(data_.size()) + " samples");
    if (!all_finite(data_)) throw std::invalid_argument("Signal: non-finite sample");
}

Signal Signal::zeros(Shape shape) { return Signal(std::vector<double>(shape.size(), 0.0), shape); }

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "subtract");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
}

}  // namespace varexp
