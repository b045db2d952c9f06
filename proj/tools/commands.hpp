#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace qmlab::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kPrecondition = 3 };

struct CommandOptions {
  std::optional<std::string> output;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

/// Runs one command.  Data (CSV, reports) goes to `data`, verdict lines to
/// `verdicts`.  Library errors propagate as qmlab::Error.
int dispatch(const RunConfig& cfg, const CommandOptions& opts, std::ostream& data,
             std::ostream& verdicts);

/// Reads the config file, dispatches, maps errors to `ERROR <code>: <reason>`
/// on `err` and returns the exit code.
int run_cli_command(const std::string& command, const std::string& config_path,
                    const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace qmlab::cli
