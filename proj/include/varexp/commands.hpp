#pragma once

#include <string>

namespace varexp {

struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::string out_dir;
    bool csv = true;
    bool pgm = false;
    bool svg = false;
    int verbosity = 0;
};

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;    ///< spec, IO or numerical error
inline constexpr int kExitAborted = 3;  ///< outputs written but a solver aborted or a check failed

int cmd_deconv1d(const RunConfig& cfg);
int cmd_denoise_mixed(const RunConfig& cfg);
int cmd_rates(const RunConfig& cfg);
int cmd_selftest(const RunConfig& cfg);

/// Routes on cfg.subcommand and turns exceptions into kExitError with a message on stderr.
int run_command(const RunConfig& cfg);

/// Iteration indices kept in rates.csv: every k up to 100, then about 100 per decade, plus the last.
bool keep_rate_row(int k, int last);

}  // namespace varexp
