#include "varexp/output.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/core.h>

namespace varexp {

std::string csv_number(double v) { return fmt::format("{:.12g}", v); }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("CsvTable: no columns");
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument(
            fmt::format("CsvTable: row has {} cells, table has {} columns", cells.size(), columns_.size()));
    for (const auto& c : cells)
        if (c.find_first_of(",\n\r\"") != std::string::npos)
            throw std::invalid_argument("CsvTable: cell '" + c + "' needs quoting, which is not supported");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    const auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(columns_);
    for (const auto& r : rows_) emit(r);
    return out;
}

void CsvTable::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

GrayImage quantize(const Signal& image) {
    GrayImage g{image.shape().rows, image.shape().cols, std::vector<std::uint8_t>(image.size(), 0)};
    if (image.size() == 0) return g;
    const auto [lo_it, hi_it] = std::minmax_element(image.values().begin(), image.values().end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo)
        for (std::size_t i = 0; i < image.size(); ++i)
            g.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * (image[i] - lo) / (hi - lo)));
    return g;
}

void write_pgm(const std::string& path, const GrayImage& image) {
    if (image.pixels.size() != image.rows * image.cols) throw std::invalid_argument("write_pgm: pixel count mismatch");
    std::string text = fmt::format("P5\n{} {}\n255\n", image.cols, image.rows);
    text.append(image.pixels.begin(), image.pixels.end());
    write_text_file(path, text);
}

void write_pgm(const std::string& path, const Signal& image) { write_pgm(path, quantize(image)); }

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            while (in.get(c) && c != '\n') {}
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok += c;
    }
    return tok;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    if (pgm_token(in) != "P5") throw std::runtime_error("read_pgm: '" + path + "' is not a binary PGM");
    GrayImage g;
    try {
        g.cols = std::stoul(pgm_token(in));
        g.rows = std::stoul(pgm_token(in));
        if (std::stoul(pgm_token(in)) != 255) throw std::runtime_error("read_pgm: only maxval 255 is supported");
    } catch (const std::logic_error&) {
        throw std::runtime_error("read_pgm: malformed header in '" + path + "'");
    }
    g.pixels.resize(g.rows * g.cols);
    in.read(reinterpret_cast<char*>(g.pixels.data()), static_cast<std::streamsize>(g.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != g.pixels.size())
        throw std::runtime_error("read_pgm: truncated pixel data in '" + path + "'");
    return g;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    const auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
    const auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
    const auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!opt.log_x || x > 0.0) && (!opt.log_y || y > 0.0);
    };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("svg_plot: series '" + s.label + "' has x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x0 == x1) x0 -= 0.5, x1 += 0.5;
    if (y0 == y1) y0 -= 0.5, y1 += 0.5;

    const double left = 70, right = 150, top = 36, bottom = 48;
    const double pw = opt.width - left - right, ph = opt.height - top - bottom;
    const auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    const auto py = [&](double v) { return top + (1.0 - (v - y0) / (y1 - y0)) * ph; };
    const auto tick = [](double v, bool log) { return log ? fmt::format("1e{:.3g}", v) : fmt::format("{:.4g}", v); };

    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        opt.width, opt.height, opt.width, opt.height);
    out += fmt::format("<text x=\"{:.1f}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       left + pw / 2, xml_escape(opt.title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n", left,
                       top, pw, ph);
    // min/max ticks on both axes
    out += fmt::format("<g font-family=\"sans-serif\" font-size=\"11\">\n");
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left, top + ph + 16, tick(x0, opt.log_x));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw, top + ph + 16,
                       tick(x1, opt.log_x));
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, top + ph, tick(y0, opt.log_y));
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, top + 10, tick(y1, opt.log_y));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, top + ph + 34,
                       xml_escape(opt.x_label));
    out += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                       top + ph / 2, top + ph / 2, xml_escape(opt.y_label));
    out += "</g>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            if (!pts.empty()) pts += ' ';
            pts += fmt::format("{:.2f},{:.2f}", px(tx(s.x[i])), py(ty(s.y[i])));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
        const double ly = top + 14 + 18.0 * static_cast<double>(si);
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           left + pw + 10, ly, left + pw + 30, ly, color);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                           left + pw + 36, ly + 4, xml_escape(s.label));
    }
    out += "</svg>\n";
    return out;
}

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& options) {
    write_text_file(path, svg_plot(series, options));
}

}  // namespace varexp
