#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varexp/signal.hpp"

namespace varexp {

/// 12 significant digits, shortest of fixed/scientific.
std::string csv_number(double v);

/// Column-ordered table written with a header row and LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }

    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes text verbatim in binary mode; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  ///< row-major
};

/// Linear map [min, max] -> [0, 255] with rounding; a flat image maps to 0.
GrayImage quantize(const Signal& image);

/// Binary P5, maxval 255.
void write_pgm(const std::string& path, const GrayImage& image);
void write_pgm(const std::string& path, const Signal& image);
GrayImage read_pgm(const std::string& path);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "k";
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// SVG 1.1 line plot: one polyline per series, axes with min/max ticks and a legend.
/// Non-positive values are dropped on log axes.
std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& options);
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& options);

}  // namespace varexp
