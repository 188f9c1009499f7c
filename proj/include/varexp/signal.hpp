#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace varexp {

/// Grid shape of a discretized signal. One-dimensional signals use rows == 1.
struct Shape {
    std::size_t rows = 1;
    std::size_t cols = 0;

    static Shape line(std::size_t n) { return {1, n}; }
    static Shape grid(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    std::size_t size() const { return rows * cols; }
    bool is_2d() const { return rows > 1; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Real-valued samples on a 1D or row-major 2D grid. Entries are always finite.
class Signal {
public:
    Signal() = default;
    explicit Signal(std::vector<double> values);
    Signal(std::vector<double> values, Shape shape);

    static Signal zeros(Shape shape);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<const double> values() const { return data_; }
    const std::vector<double>& vector() const { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }

    double at(std::size_t row, std::size_t col) const { return data_[row * shape_.cols + col]; }

private:
    std::vector<double> data_;
    Shape shape_;
};

// Small dense-vector helpers shared by the numerical modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);
std::vector<double> subtract(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

void require_same_length(std::size_t a, std::size_t b, const char* what);

}  // namespace varexp
