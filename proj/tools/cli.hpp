#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace affdim::cli {

/// Process exit codes. Stable across releases.
enum ExitCode : int {
  kOk = 0,
  kNotCertified = 1,   // a requested certificate or pipeline check did not pass
  kConfigError = 2,    // malformed config file or command line
  kPrecondition = 3,   // input violates a documented precondition
  kBudget = 4,         // word or subset budget exceeded
  kNumerical = 5,      // non-convergence or estimation failure
  kIoError = 6,
  kRerunMismatch = 7,  // `report --rerun` produced different numbers
};

/// Runs one command line (without the program name). The report goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affdim::cli
