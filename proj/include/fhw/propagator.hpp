#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "fhw/grid.hpp"
#include "fhw/model.hpp"
#include "fhw/special_functions.hpp"

namespace fhw {

/// Per-shell multipliers of L_alpha(t) on one grid, cached by exact t.
///
/// On a cubic box |xi|^2 = (pi/L)^2 m with integer m, so every radial
/// multiplier is a table over the shells m that occur on the grid.
class PropagatorContext {
 public:
  PropagatorContext(const ModelParams& model, const BoxGrid& grid, const MLParams& ml = {});

  const ModelParams& model() const { return model_; }
  const BoxGrid& grid() const { return grid_; }

  /// Shell index m of every flat lattice index.
  const std::vector<int>& shell_of_mode() const { return shell_of_mode_; }
  /// Distinct shells present, ascending.
  const std::vector<int>& shells() const { return shells_; }
  /// |xi|^2 of shell m.
  double shell_xi_sq(int m) const { return step_sq_ * m; }
  int max_shell() const { return max_shell_; }

  /// E_alpha(-t^alpha |xi|^2) indexed by shell (entries for absent shells are
  /// unspecified). Entries are computed once per t and shared.
  std::shared_ptr<const std::vector<double>> multipliers(double t) const;

  SpectralField propagate(const SpectralField& u0_hat, double t) const;
  GridFunction propagate(const GridFunction& u0, double t) const;

  /// Number of distinct t currently cached.
  std::size_t cache_size() const;

  /// E_{alpha,b}(-x) for this alpha, through a shared Chebyshev table.
  const MittagLefflerTable& ml_table(double b) const;

 private:
  ModelParams model_;
  BoxGrid grid_;
  MLParams ml_;
  double step_sq_ = 0.0;
  int max_shell_ = 0;
  std::vector<int> shell_of_mode_;
  std::vector<int> shells_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const std::vector<double>>> cache_;
  mutable std::map<double, std::unique_ptr<MittagLefflerTable>> tables_;
};

/// L_alpha(t) u0 = F^-1[E_alpha(-t^alpha |xi|^2) F u0].
GridFunction linear_propagate(const GridFunction& u0, double t, const ModelParams& model);

struct KernelReport {
  /// Estimated contribution of the frequencies beyond the auxiliary lattice.
  double tail_truncation = 0.0;
  /// Auxiliary lattice actually used.
  double aux_half_length = 0.0;
  int aux_points = 0;
};

/// k_alpha(t, x) = (1/2pi) int e^(i x xi) E_alpha(-t^alpha xi^2) d xi (n = 1),
/// normalized to unit mass. The algebraic tail of the symbol is removed in
/// closed form; the smooth remainder is inverted on an auxiliary lattice 8x
/// finer and 4x wider than the requested samples and interpolated.
std::vector<double> kernel_sample_1d(double alpha, double t, std::span<const double> xs,
                                     KernelReport* report = nullptr);

/// nu w^(alpha-1) E_{alpha,alpha}(-w^alpha |xi|^2): the per-mode forcing
/// kernel at lag w.
double duhamel_multiplier(double alpha, double nu, double dt_lag, double xi_sq);

/// |<L_alpha(t) u0 - u0, v>| (discrete pairing h^n sum) for each t.
std::vector<double> smalltime_pairing_check(const GridFunction& u0, const GridFunction& v,
                                            std::span<const double> ts, const ModelParams& model);

}  // namespace fhw
