#pragma once

#include "config.hpp"

#include <iosfwd>

namespace cmetric::cli {

enum ExitCode : int { success = 0, config_error = 2, numerical_failure = 3 };

/// Writes solution.json, beta.csv and timing.json.
int cmd_solve(const RunConfig& cfg, std::ostream& out);

/// Writes convergence.csv (alpha, e_s, ratio_s, e, ratio) plus a reference row.
int cmd_convergence(const RunConfig& cfg, std::ostream& out);

/// Writes fields.csv on the evaluation grid and fields_summary.json.
int cmd_fields(const RunConfig& cfg, std::ostream& out);

/// Writes ellipses.csv (anchor_id, x, y) and ellipses_summary.json. Fails
/// only when S is not positive definite at every anchor.
int cmd_ellipses(const RunConfig& cfg, std::ostream& out);

/// Command-line entry point; maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmetric::cli
