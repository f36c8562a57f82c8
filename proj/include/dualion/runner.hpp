#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dualion/config.hpp"

namespace dualion {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitIoError = 4;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunReport {
  bool converged = true;
  std::vector<std::string> files;  // paths written, in order
};

// Runs the configured experiment and writes <exp>.csv, <exp>_fit.json and any
// auxiliary curves into config.output_dir. Throws OutputError on I/O failure.
RunReport run_experiment(const RunConfig& config);

// Full-precision CSV of a curve: sweep_value,mean,stderr[,mub_0..mub_5].
std::string curve_csv(const std::vector<CurveRecord>& curve);

// Maps run_experiment outcomes and errors onto process exit codes, printing
// diagnostics to stderr.
int run_with_exit_code(const RunConfig& config);

}  // namespace dualion
