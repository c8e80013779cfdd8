#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhw/grid.hpp"
#include "fhw/model.hpp"
#include "fhw/trajectory.hpp"

namespace fhw {

/// Named initial-data generator. Fields not used by `kind` are ignored.
struct InitialData {
  /// gaussian, sine, cosine, homogeneous, indicator or file.
  std::string kind = "gaussian";
  double amplitude = 0.1;
  /// Gaussian width w in exp(-|x - c|^2 / w^2).
  double width = 1.0;
  /// Ball radius of the indicator.
  double radius = 1.0;
  /// Mollification of the homogeneous profile.
  double eps = 0.25;
  std::vector<double> center;
  /// Integer wave vector m of sin / cos((pi/L) m . x).
  std::vector<int> mode;
  std::string path;
};

struct Tolerances {
  double picard_tol = 1e-10;
  int max_iter = 50;
  int corrector_iters = 3;
  double blowup_threshold = 1e8;
};

struct RunConfig {
  ModelParams model{.alpha = 1.5, .rho = 3.0, .gamma_sign = 1};
  int n = 2;
  std::vector<int> sizes{64, 64};
  double L = 8.0;
  double T = 1.0;
  int Nt = 64;
  double p = 3.0;
  double q = 3.2;
  double mu = 0.0;
  InitialData initial;
  Tolerances tolerances;
  /// Empty: $FHW_OUT_DIR, else ./fhw_out.
  std::string output_dir;
  /// Snapshot stride of `solve`.
  int stride = 8;
  unsigned long long seed = 0;

  BoxGrid grid() const { return BoxGrid(sizes, L); }
  TimeGrid time_grid() const { return TimeGrid(T, Nt); }
  std::filesystem::path resolved_output_dir() const;

  /// FNV-1a hash of the canonical JSON dump, output directory excluded.
  std::string hash() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing fields keep their defaults; unknown keys raise PreconditionError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Samples the initial-data generator on the config grid. A `file`
/// generator must match the configured grid.
GridFunction make_initial_data(const RunConfig& c);

}  // namespace fhw
