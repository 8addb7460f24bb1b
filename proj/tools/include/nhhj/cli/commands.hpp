#pragma once

#include <iosfwd>

#include "nhhj/cli/config.hpp"

namespace nhhj::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInvalidInput = 2 };

/// Each command writes its data product (CSV or JSON) to cfg.output when set,
/// otherwise to `out`. Human-readable summaries go to `out` when the data
/// went to a file and to `err` otherwise, so stdout stays machine-readable.
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify_hj(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check_structure(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Argument parsing and dispatch for the nhhj executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nhhj::cli
