#include "varexp/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <stdexcept>

#include <fmt/core.h>

#include "varexp/experiments.hpp"
#include "varexp/output.hpp"
#include "varexp/selftest.hpp"
#include "varexp/spec_file.hpp"

namespace varexp {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& file) { return (fs::path(cfg.out_dir) / file).string(); }

void prepare_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw std::invalid_argument("--out is required");
    fs::create_directories(cfg.out_dir);
}

SpecFile read_spec(const RunConfig& cfg) {
    if (cfg.spec_path.empty()) throw std::invalid_argument("--spec is required");
    auto spec = load_spec(cfg.spec_path);
    apply_seed_override(spec);
    return spec;
}

CsvTable trace_table(const IterateTrace& trace) {
    CsvTable t({"k", "objective", "residual", "relative_change", "tau", "inner", "modular_increment",
                "descent_surrogate", "wall_time_s"});
    for (const auto& r : trace.records)
        t.add_row({std::to_string(r.k), csv_number(r.objective), csv_number(r.residual), csv_number(r.relative_change),
                   csv_number(r.tau), std::to_string(r.inner), csv_number(r.modular_increment),
                   csv_number(r.descent_surrogate), csv_number(r.wall_time)});
    return t;
}

CsvTable signals_table(const Problem& pb, const std::vector<SolverRun>& runs) {
    std::vector<std::string> cols = {"row", "col", "truth", "clean_data", "data", "exponent"};
    for (const auto& r : runs) cols.push_back("x_" + r.solver);
    CsvTable t(std::move(cols));
    const Shape shape = pb.truth.shape();
    for (std::size_t i = 0; i < pb.truth.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i / shape.cols), std::to_string(i % shape.cols),
                                        csv_number(pb.truth[i]),      csv_number(pb.clean_data[i]),
                                        csv_number(pb.data[i]),       csv_number(pb.exponent[i])};
        for (const auto& r : runs) row.push_back(csv_number(r.result.x[i]));
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable metrics_table(const std::vector<SolverRun>& runs) {
    CsvTable t({"solver", "mse", "psnr_db", "support_f1", "iterations", "wall_time_s", "converged", "aborted"});
    for (const auto& r : runs)
        t.add_row({r.solver, csv_number(r.metrics.mse), csv_number(r.metrics.psnr), csv_number(r.metrics.support_f1),
                   std::to_string(r.metrics.iterations), csv_number(r.metrics.wall_time),
                   r.result.trace.converged ? "1" : "0", r.result.trace.aborted ? "1" : "0"});
    return t;
}

void report_runs(const RunConfig& cfg, const std::vector<SolverRun>& runs) {
    for (const auto& r : runs) {
        fmt::print("{:<9} mse {:.4e}  psnr {:7.3f} dB  f1 {:.3f}  iterations {}{}\n", r.solver, r.metrics.mse,
                   r.metrics.psnr, r.metrics.support_f1, r.metrics.iterations,
                   r.result.trace.aborted ? "  ABORTED" : (r.result.trace.converged ? "" : "  (iteration cap)"));
        if (cfg.verbosity > 0)
            for (const auto& w : r.result.trace.warnings) fmt::print(stderr, "  {}: {}\n", r.solver, w);
    }
}

bool any_aborted(const std::vector<SolverRun>& runs) {
    for (const auto& r : runs)
        if (r.result.trace.aborted) return true;
    return false;
}

// Shared by deconv1d and denoise-mixed.
int reconstruct(const RunConfig& cfg, const SpecFile& spec) {
    const auto& e = spec.experiment;
    prepare_out_dir(cfg);
    if (cfg.verbosity > 0) fmt::print(stderr, "{}: building problem (seed {})\n", e.name, e.seed);
    const auto pb = make_problem(e);
    const auto runs = run_reconstructions(e, pb);
    report_runs(cfg, runs);

    if (cfg.csv) {
        signals_table(pb, runs).write(out_path(cfg, "signals.csv"));
        metrics_table(runs).write(out_path(cfg, "metrics.csv"));
        for (const auto& r : runs) trace_table(r.result.trace).write(out_path(cfg, "trace_" + r.solver + ".csv"));
    }
    if (cfg.pgm) {
        if (!e.shape.is_2d()) throw std::invalid_argument("--pgm needs a 2D problem (problem.rows > 1)");
        write_pgm(out_path(cfg, "truth.pgm"), pb.truth);
        write_pgm(out_path(cfg, "data.pgm"), pb.data);
        write_pgm(out_path(cfg, "exponent.pgm"), Signal(std::vector<double>(pb.exponent.values().begin(), pb.exponent.values().end()), e.shape));
        for (const auto& r : runs) write_pgm(out_path(cfg, "recon_" + r.solver + ".pgm"), r.result.x);
    }
    if (cfg.svg) {
        if (!e.shape.is_2d()) {
            std::vector<PlotSeries> series;
            const auto as_series = [&](const std::string& label, const Signal& s) {
                PlotSeries ps{label, {}, s.vector()};
                for (std::size_t i = 0; i < s.size(); ++i) ps.x.push_back(static_cast<double>(i));
                return ps;
            };
            series.push_back(as_series("truth", pb.truth));
            series.push_back(as_series("data", pb.data));
            for (const auto& r : runs) series.push_back(as_series(r.solver, r.result.x));
            write_svg_plot(out_path(cfg, "signals.svg"), series, {e.name, "i", "amplitude"});
        }
        std::vector<PlotSeries> objs;
        for (const auto& r : runs) {
            PlotSeries ps{r.solver, {}, {}};
            for (const auto& rec : r.result.trace.records) {
                ps.x.push_back(rec.k);
                ps.y.push_back(rec.objective);
            }
            objs.push_back(std::move(ps));
        }
        write_svg_plot(out_path(cfg, "objective.svg"), objs, {e.name + ": objective", "k", "phi", true, true});
    }
    return any_aborted(runs) ? kExitAborted : kExitOk;
}

}  // namespace

bool keep_rate_row(int k, int last) {
    if (k <= 100 || k == last) return true;
    // k is kept when it is the first integer past a point of the grid 10^(j/100).
    const double prev = std::floor(100.0 * std::log10(static_cast<double>(k - 1)));
    const double here = std::floor(100.0 * std::log10(static_cast<double>(k)));
    return here > prev;
}

int cmd_deconv1d(const RunConfig& cfg) {
    const auto spec = read_spec(cfg);
    if (spec.experiment.shape.is_2d()) throw std::invalid_argument("deconv1d: spec describes a 2D problem");
    return reconstruct(cfg, spec);
}

int cmd_denoise_mixed(const RunConfig& cfg) {
    const auto spec = read_spec(cfg);
    if (spec.experiment.noise.empty()) throw std::invalid_argument("denoise-mixed: spec has no noise model");
    return reconstruct(cfg, spec);
}

int cmd_rates(const RunConfig& cfg) {
    const auto spec = read_spec(cfg);
    prepare_out_dir(cfg);
    const auto& e = spec.experiment;
    if (cfg.verbosity > 0)
        fmt::print(stderr, "{}: reference ISTA with {} iterations\n", e.name, e.reference_iters);
    const auto report = run_rate_study(e);
    fmt::print("reference objective {:.12g} after {} ISTA iterations\n", report.reference_objective,
               report.reference_iterations);

    bool aborted = false;
    for (const auto& c : report.curves) {
        const auto& tr = c.run.result.trace;
        aborted |= tr.aborted;
        fmt::print("{:<9} iterations {:>7}  time {:8.3f} s  {}{}\n", c.run.solver, tr.iterations(), tr.wall_time(),
                   tr.converged ? "converged" : (tr.aborted ? "ABORTED" : "iteration cap"),
                   c.slope_valid ? fmt::format("  tail slope {:.3f}", c.slope) : std::string());
    }

    if (cfg.csv) {
        CsvTable rates({"solver", "k", "r_k", "wall_time_s"});
        CsvTable table({"solver", "iterations", "cpu_time_s"});
        CsvTable slopes({"solver", "converged", "slope_valid", "tail_slope"});
        for (const auto& c : report.curves) {
            const auto& tr = c.run.result.trace;
            for (const auto& r : tr.records)
                if (keep_rate_row(r.k, tr.iterations()))
                    rates.add_row({c.run.solver, std::to_string(r.k), csv_number(r.residual), csv_number(r.wall_time)});
            table.add_row({c.run.solver, std::to_string(tr.iterations()), csv_number(tr.wall_time())});
            slopes.add_row({c.run.solver, tr.converged ? "1" : "0", c.slope_valid ? "1" : "0",
                            c.slope_valid ? csv_number(c.slope) : "nan"});
        }
        rates.write(out_path(cfg, "rates.csv"));
        table.write(out_path(cfg, "table.csv"));
        slopes.write(out_path(cfg, "slopes.csv"));
        CsvTable ref({"reference_objective", "reference_iterations"});
        ref.add_row({csv_number(report.reference_objective), std::to_string(report.reference_iterations)});
        ref.write(out_path(cfg, "reference.csv"));
    }
    if (cfg.svg) {
        std::vector<PlotSeries> series;
        for (const auto& c : report.curves) {
            PlotSeries ps{c.run.solver, {}, {}};
            for (const auto& r : c.run.result.trace.records)
                if (keep_rate_row(r.k, c.run.result.trace.iterations())) {
                    ps.x.push_back(r.k);
                    ps.y.push_back(r.residual);
                }
            series.push_back(std::move(ps));
        }
        write_svg_plot(out_path(cfg, "rates.svg"), series, {e.name + ": phi(x^k) - phi_ref", "k", "r_k", true, true});
    }
    return aborted ? kExitAborted : kExitOk;
}

int cmd_selftest(const RunConfig& cfg) {
    std::uint64_t seed = 1;
    if (!cfg.spec_path.empty()) seed = read_spec(cfg).experiment.seed;
    const auto results = run_selftest(seed);
    bool all = true;
    for (const auto& r : results) {
        fmt::print("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
        all &= r.passed;
    }
    if (!cfg.out_dir.empty() && cfg.csv) {
        prepare_out_dir(cfg);
        CsvTable t({"check", "passed"});
        for (const auto& r : results) t.add_row({r.name, r.passed ? "1" : "0"});
        t.write(out_path(cfg, "selftest.csv"));
    }
    fmt::print("{}\n", all ? "selftest passed" : "selftest FAILED");
    return all ? kExitOk : kExitAborted;
}

int run_command(const RunConfig& cfg) {
    try {
        if (cfg.subcommand == "deconv1d") return cmd_deconv1d(cfg);
        if (cfg.subcommand == "denoise-mixed") return cmd_denoise_mixed(cfg);
        if (cfg.subcommand == "rates") return cmd_rates(cfg);
        if (cfg.subcommand == "selftest") return cmd_selftest(cfg);
        throw std::invalid_argument("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const std::exception& ex) {
        fmt::print(stderr, "varexp-prox {}: error: {}\n", cfg.subcommand, ex.what());
        return kExitError;
    }
}

}  // namespace varexp
