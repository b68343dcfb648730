// commands.hpp: the four figure-reproduction subcommands. Each writes CSV or
// JSON data files plus a standalone plot script into the configured output
// directory and returns a process exit code (0 ok, 3 numerical/truncation
// error, 4 verification failure).

#pragma once

#include "qotto/cli/config.hpp"

namespace qotto::cli {

inline constexpr const char* kVersion = "0.1.0";

// Work-heat Pearson coefficient against the adiabaticity parameter.
int cmd_pearson(const RunConfig& config);

// Efficiency large-deviation curves; the linear regime also emits the exact
// curve for side-by-side comparison.
int cmd_ldf(const RunConfig& config);

// CGF contour grids as JSON with an undefined-cell mask.
int cmd_contour(const RunConfig& config);

// Monte Carlo block sampling: histograms and empirical rate estimates.
int cmd_sample(const RunConfig& config);

}  // namespace qotto::cli
