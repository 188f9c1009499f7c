#include "varexp/operators.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace varexp {

namespace {

// Maps a possibly out-of-range index to [0, n); returns -1 when it falls in the zero padding.
inline long wrap(long i, long n, Boundary b) {
    if (i >= 0 && i < n) return i;
    if (b == Boundary::zero) return -1;
    long r = i % n;
    return r < 0 ? r + n : r;
}

void check_kernel_1d(std::size_t n, const ConvolutionKernel& k) {
    if (k.shape.is_2d()) throw std::invalid_argument("conv1d: kernel is two-dimensional");
    if (k.taps.empty() || k.taps.size() > n)
        throw std::invalid_argument("conv1d: kernel length must be in [1, signal length]");
}

void check_kernel_2d(std::span<const double> x, Shape shape, const ConvolutionKernel& k) {
    require_same_length(x.size(), shape.size(), "conv2d");
    if (k.taps.empty() || k.shape.size() != k.taps.size() || k.shape.rows > shape.rows ||
        k.shape.cols > shape.cols)
        throw std::invalid_argument("conv2d: kernel does not fit the grid");
}

}  // namespace

Boundary parse_boundary(const std::string& text) {
    if (text == "zero") return Boundary::zero;
    if (text == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary mode '" + text + "'");
}

ConvolutionKernel ConvolutionKernel::line(std::vector<double> taps) {
    const std::size_t n = taps.size();
    ConvolutionKernel k{std::move(taps), Shape::line(n)};
    if (!all_finite(k.taps)) throw std::invalid_argument("ConvolutionKernel: non-finite tap");
    return k;
}

ConvolutionKernel ConvolutionKernel::grid(std::vector<double> taps, std::size_t rows, std::size_t cols) {
    ConvolutionKernel k{std::move(taps), Shape::grid(rows, cols)};
    if (k.taps.size() != rows * cols) throw std::invalid_argument("ConvolutionKernel: shape mismatch");
    if (!all_finite(k.taps)) throw std::invalid_argument("ConvolutionKernel: non-finite tap");
    return k;
}

ConvolutionKernel ConvolutionKernel::delta() { return line({1.0}); }

void ConvolutionKernel::normalize() {
    const double s = std::accumulate(taps.begin(), taps.end(), 0.0);
    if (s == 0.0) throw std::invalid_argument("ConvolutionKernel: cannot normalize zero-sum taps");
    for (double& t : taps) t /= s;
}

ConvolutionKernel gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel: size must be odd and >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const int c = size / 2;
    std::vector<double> taps(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        const double d = static_cast<double>(i - c);
        taps[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d / (sigma * sigma));
    }
    // Mirror so the two halves are bitwise identical.
    for (int i = 0; i < c; ++i) taps[static_cast<std::size_t>(size - 1 - i)] = taps[static_cast<std::size_t>(i)];
    auto k = ConvolutionKernel::line(std::move(taps));
    k.normalize();
    return k;
}

ConvolutionKernel gaussian_kernel_2d(int size, double sigma) {
    const auto g = gaussian_kernel(size, sigma);
    const std::size_t n = g.taps.size();
    std::vector<double> taps(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) taps[r * n + c] = g.taps[r] * g.taps[c];
    auto k = ConvolutionKernel::grid(std::move(taps), n, n);
    k.normalize();
    return k;
}

std::vector<double> conv1d_apply(std::span<const double> x, const ConvolutionKernel& k, Boundary boundary) {
    check_kernel_1d(x.size(), k);
    const long n = static_cast<long>(x.size());
    const long m = static_cast<long>(k.taps.size());
    const long c = m / 2;
    std::vector<double> out(x.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (long j = 0; j < m; ++j) {
            const long idx = wrap(i + c - j, n, boundary);
            if (idx >= 0) s += k.taps[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<double> conv1d_adjoint(std::span<const double> y, const ConvolutionKernel& k, Boundary boundary) {
    check_kernel_1d(y.size(), k);
    const long n = static_cast<long>(y.size());
    const long m = static_cast<long>(k.taps.size());
    const long c = m / 2;
    std::vector<double> out(y.size(), 0.0);
    for (long l = 0; l < n; ++l) {
        double s = 0.0;
        for (long j = 0; j < m; ++j) {
            const long idx = wrap(l - c + j, n, boundary);
            if (idx >= 0) s += k.taps[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(l)] = s;
    }
    return out;
}

namespace {

std::vector<double> conv2d(std::span<const double> x, Shape shape, const ConvolutionKernel& k,
                           Boundary boundary, bool transpose) {
    check_kernel_2d(x, shape, k);
    const long rows = static_cast<long>(shape.rows), cols = static_cast<long>(shape.cols);
    const long kr = static_cast<long>(k.shape.rows), kc = static_cast<long>(k.shape.cols);
    const long cr = kr / 2, cc = kc / 2;
    const long sgn = transpose ? 1 : -1;
    std::vector<double> out(x.size(), 0.0);
    for (long r = 0; r < rows; ++r) {
        for (long s = 0; s < cols; ++s) {
            double acc = 0.0;
            for (long a = 0; a < kr; ++a) {
                const long rr = wrap(transpose ? r - cr + a : r + cr - a, rows, boundary);
                if (rr < 0) continue;
                for (long b = 0; b < kc; ++b) {
                    const long ss = wrap(s - sgn * cc + sgn * b, cols, boundary);
                    if (ss < 0) continue;
                    acc += k.taps[static_cast<std::size_t>(a * kc + b)] *
                           x[static_cast<std::size_t>(rr * cols + ss)];
                }
            }
            out[static_cast<std::size_t>(r * cols + s)] = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<double> conv2d_apply(std::span<const double> x, Shape shape, const ConvolutionKernel& k,
                                 Boundary boundary) {
    return conv2d(x, shape, k, boundary, false);
}

std::vector<double> conv2d_adjoint(std::span<const double> y, Shape shape, const ConvolutionKernel& k,
                                   Boundary boundary) {
    return conv2d(y, shape, k, boundary, true);
}

std::vector<double> IdentityOperator::apply(std::span<const double> x) const {
    require_same_length(x.size(), shape_.size(), "IdentityOperator");
    return {x.begin(), x.end()};
}

std::vector<double> IdentityOperator::adjoint(std::span<const double> y) const { return apply(y); }

MatrixOperator::MatrixOperator(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw std::invalid_argument("MatrixOperator: shape mismatch");
    if (!all_finite(entries_)) throw std::invalid_argument("MatrixOperator: non-finite entry");
}

MatrixOperator MatrixOperator::random_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(rows)));
    std::vector<double> e(rows * cols);
    for (double& v : e) v = normal(rng);
    return MatrixOperator(rows, cols, std::move(e));
}

std::vector<double> MatrixOperator::apply(std::span<const double> x) const {
    require_same_length(x.size(), cols_, "MatrixOperator::apply");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) s += entries_[r * cols_ + c] * x[c];
        out[r] = s;
    }
    return out;
}

std::vector<double> MatrixOperator::adjoint(std::span<const double> y) const {
    require_same_length(y.size(), rows_, "MatrixOperator::adjoint");
    std::vector<double> out(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out[c] += entries_[r * cols_ + c] * y[r];
    return out;
}

ConvolutionOperator::ConvolutionOperator(Shape shape, ConvolutionKernel kernel, Boundary boundary)
    : shape_(shape), kernel_(std::move(kernel)), boundary_(boundary) {
    if (kernel_.shape.is_2d() && !shape_.is_2d())
        throw std::invalid_argument("ConvolutionOperator: 2D kernel on a 1D signal");
    if (!kernel_.shape.is_2d() && shape_.is_2d()) {
        // A line kernel on a grid acts along rows and columns (separable blur).
        const std::size_t n = kernel_.taps.size();
        std::vector<double> taps(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) taps[r * n + c] = kernel_.taps[r] * kernel_.taps[c];
        kernel_ = ConvolutionKernel::grid(std::move(taps), n, n);
    }
    if (shape_.is_2d()) {
        if (kernel_.shape.rows > shape_.rows || kernel_.shape.cols > shape_.cols)
            throw std::invalid_argument("ConvolutionOperator: kernel larger than grid");
    } else {
        check_kernel_1d(shape_.size(), kernel_);
    }
}

std::vector<double> ConvolutionOperator::apply(std::span<const double> x) const {
    require_same_length(x.size(), shape_.size(), "ConvolutionOperator::apply");
    return shape_.is_2d() ? conv2d_apply(x, shape_, kernel_, boundary_) : conv1d_apply(x, kernel_, boundary_);
}

std::vector<double> ConvolutionOperator::adjoint(std::span<const double> y) const {
    require_same_length(y.size(), shape_.size(), "ConvolutionOperator::adjoint");
    return shape_.is_2d() ? conv2d_adjoint(y, shape_, kernel_, boundary_)
                          : conv1d_adjoint(y, kernel_, boundary_);
}

std::string ConvolutionOperator::name() const {
    return std::string(shape_.is_2d() ? "conv2d" : "conv1d") +
           (boundary_ == Boundary::periodic ? "-periodic" : "-zero");
}

NormEstimate estimate_operator_norm(const LinearOperator& op, int max_iters, double tol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(op.input_shape().size());
    for (double& e : v) e = normal(rng);
    double nv = norm2(v);
    for (double& e : v) e /= nv;

    NormEstimate est;
    for (int it = 0; it < max_iters; ++it) {
        auto w = op.adjoint(op.apply(v));
        const double nw = norm2(w);
        if (nw == 0.0) {
            est.history.push_back(0.0);
            break;
        }
        const double value = std::sqrt(nw);
        est.history.push_back(value);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(value - est.value) <= tol * value) {
            est.value = value;
            break;
        }
        est.value = value;
    }
    return est;
}

double adjoint_mismatch(const LinearOperator& op, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(op.input_shape().size()), y(op.output_shape().size());
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (double& e : x) e = u(rng);
        for (double& e : y) e = u(rng);
        const auto ax = op.apply(x);
        const auto aty = op.adjoint(y);
        const double lhs = dot(ax, y), rhs = dot(x, aty);
        const double scale = std::max(norm2(ax) * norm2(y), norm2(x) * norm2(aty));
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

}  // namespace varexp
