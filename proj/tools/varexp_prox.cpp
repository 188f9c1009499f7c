#include <CLI11.hpp>

#include "varexp/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Proximal solvers in variable-exponent Lebesgue spaces"};
    app.require_subcommand(1);

    varexp::RunConfig cfg;
    bool csv = false, pgm = false, svg = false;
    int verbose = 0;

    const auto add_common = [&](CLI::App* sub, bool spec_required) {
        auto* spec = sub->add_option("--spec", cfg.spec_path, "experiment spec file")->check(CLI::ExistingFile);
        if (spec_required) spec->required();
        auto* out = sub->add_option("--out", cfg.out_dir, "output directory");
        if (spec_required) out->required();
        sub->add_flag("--csv", csv, "write CSV tables (default when no emit flag is given)");
        sub->add_flag("--pgm", pgm, "write PGM images (2D problems)");
        sub->add_flag("--svg", svg, "write SVG plots");
        sub->add_flag("-v,--verbose", verbose, "print progress and warnings to stderr");
    };
    add_common(app.add_subcommand("deconv1d", "spike / heterogeneous deconvolution"), true);
    add_common(app.add_subcommand("denoise-mixed", "mixed Gaussian and salt-and-pepper restoration, 1D or 2D"), true);
    add_common(app.add_subcommand("rates", "convergence-rate study against a long ISTA reference"), true);
    add_common(app.add_subcommand("selftest", "run the property suite"), false);

    CLI11_PARSE(app, argc, argv);

    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.csv = csv || !(pgm || svg);
    cfg.pgm = pgm;
    cfg.svg = svg;
    cfg.verbosity = verbose;
    return varexp::run_command(cfg);
}
