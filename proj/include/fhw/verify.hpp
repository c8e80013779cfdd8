#pragma once

#include <string>
#include <vector>

#include "fhw/config.hpp"

namespace fhw {

/// One check: pass is decided by `relation` between value and threshold.
struct Verdict {
  std::string suite;
  std::string name;
  double value = 0.0;
  /// "<=", ">=" or "==".
  std::string relation = "<=";
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  /// Points per axis of the exhaustive-oracle grids of the norms suite.
  int grid = 16;
  /// Independent suites run on up to `jobs` threads; results keep suite order.
  int jobs = 1;
  unsigned long long seed = 20240611;
};

/// mlf, propagator, norms, contraction, symmetry, selfsim, decay, asymptotic.
const std::vector<std::string>& verify_suite_names();

/// Runs one suite. The symmetry suite uses the model, grid and time grid of
/// `config`; the others run their own fixed configurations.
std::vector<Verdict> run_suite(const std::string& suite, const RunConfig& config,
                               const VerifyOptions& options);

/// Expands "all" and runs every requested suite. An exception inside a
/// suite becomes a failing verdict named "exception".
std::vector<Verdict> run_verification(const std::vector<std::string>& suites,
                                      const RunConfig& config, const VerifyOptions& options);

}  // namespace fhw
