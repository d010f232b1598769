#pragma once

#include <stdexcept>
#include <string>

#include "fpplab/config.hpp"
#include "fpplab/io.hpp"

namespace fpplab {

// Process exit codes: clean run, a checked property that failed, a result
// the data cannot decide at the requested precision, unusable inputs, and
// runtime faults (I/O, disconnection, exhausted budgets).
enum class ExitCode : int { Ok = 0, Violation = 1, Undecided = 2, BadConfig = 3, Failure = 4 };

// Input problems discovered after parsing (e.g. a derived default that
// degenerates for the chosen law).  Mapped to BadConfig.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Execute one resolved run: compute, render, write to cfg.output.
// The document produced is also handed back for callers that want it.
ExitCode run_command(const RunConfig& cfg, TableDoc* doc_out = nullptr);

// Full command-line entry: parse argv, resolve, run, report errors on
// stderr.  Returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace fpplab
