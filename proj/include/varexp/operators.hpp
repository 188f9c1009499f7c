#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "varexp/signal.hpp"

namespace varexp {

/// Linear forward map A : R^n -> R^m with an exact adjoint.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual Shape input_shape() const = 0;
    virtual Shape output_shape() const = 0;
    virtual std::vector<double> apply(std::span<const double> x) const = 0;
    virtual std::vector<double> adjoint(std::span<const double> y) const = 0;
    virtual std::string name() const = 0;
};

enum class Boundary { zero, periodic };

Boundary parse_boundary(const std::string& text);

/// Convolution taps on a 1D line or a row-major 2D grid.
struct ConvolutionKernel {
    std::vector<double> taps;
    Shape shape;

    static ConvolutionKernel line(std::vector<double> taps);
    static ConvolutionKernel grid(std::vector<double> taps, std::size_t rows, std::size_t cols);
    static ConvolutionKernel delta();

    /// Rescales taps so they sum to one.
    void normalize();
};

/// Sampled Gaussian of odd length `size`, normalized to unit sum. Size 1 gives the delta kernel.
ConvolutionKernel gaussian_kernel(int size, double sigma);

/// Outer product of two 1D Gaussians.
ConvolutionKernel gaussian_kernel_2d(int size, double sigma);

// "Same"-size convolution: out[i] = sum_j k[j] x[i + c - j] with c = len(k) / 2.
// Out-of-range samples are zero (or wrap, for periodic boundaries).
std::vector<double> conv1d_apply(std::span<const double> x, const ConvolutionKernel& k,
                                 Boundary boundary = Boundary::zero);
std::vector<double> conv1d_adjoint(std::span<const double> y, const ConvolutionKernel& k,
                                   Boundary boundary = Boundary::zero);
std::vector<double> conv2d_apply(std::span<const double> x, Shape shape, const ConvolutionKernel& k,
                                 Boundary boundary = Boundary::zero);
std::vector<double> conv2d_adjoint(std::span<const double> y, Shape shape,
                                   const ConvolutionKernel& k, Boundary boundary = Boundary::zero);

class IdentityOperator final : public LinearOperator {
public:
    explicit IdentityOperator(Shape shape) : shape_(shape) {}
    Shape input_shape() const override { return shape_; }
    Shape output_shape() const override { return shape_; }
    std::vector<double> apply(std::span<const double> x) const override;
    std::vector<double> adjoint(std::span<const double> y) const override;
    std::string name() const override { return "identity"; }

private:
    Shape shape_;
};

/// Dense row-major m x n matrix.
class MatrixOperator final : public LinearOperator {
public:
    MatrixOperator(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static MatrixOperator random_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed);

    Shape input_shape() const override { return Shape::line(cols_); }
    Shape output_shape() const override { return Shape::line(rows_); }
    std::vector<double> apply(std::span<const double> x) const override;
    std::vector<double> adjoint(std::span<const double> y) const override;
    std::string name() const override { return "matrix"; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;
};

/// Convolution on a line (kernel 1D) or a grid (kernel 2D) of fixed shape.
class ConvolutionOperator final : public LinearOperator {
public:
    ConvolutionOperator(Shape shape, ConvolutionKernel kernel, Boundary boundary = Boundary::zero);

    Shape input_shape() const override { return shape_; }
    Shape output_shape() const override { return shape_; }
    std::vector<double> apply(std::span<const double> x) const override;
    std::vector<double> adjoint(std::span<const double> y) const override;
    std::string name() const override;

    const ConvolutionKernel& kernel() const { return kernel_; }

private:
    Shape shape_;
    ConvolutionKernel kernel_;
    Boundary boundary_;
};

struct NormEstimate {
    double value = 0.0;
    /// Estimate after each power iteration; non-decreasing up to rounding.
    std::vector<double> history;
};

/// Power iteration on A^T A from a seeded random start.
NormEstimate estimate_operator_norm(const LinearOperator& op, int max_iters = 100, double tol = 1e-8,
                                    std::uint64_t seed = 12345);

/// Largest relative violation of <Ax, y> = <x, A^T y> over `trials` seeded random pairs.
double adjoint_mismatch(const LinearOperator& op, int trials, std::uint64_t seed);

}  // namespace varexp
