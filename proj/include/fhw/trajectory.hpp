#pragma once

#include <cmath>
#include <vector>

#include "fhw/errors.hpp"
#include "fhw/grid.hpp"

namespace fhw {

/// Uniform time nodes t_k = k dt, k = 0..Nt.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : TimeGrid(from_step(horizon / steps, steps)) {
    if (!(horizon > 0.0)) throw DomainError("TimeGrid: horizon must be positive");
  }

  /// Grid with an explicit step; truncations keep the step bit-for-bit.
  static TimeGrid from_step(double dt, int steps) {
    if (steps < 8) throw DomainError("TimeGrid: at least 8 steps are required");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("TimeGrid: step must be positive");
    TimeGrid g;
    g.dt_ = dt;
    g.steps_ = steps;
    return g;
  }

  double dt() const { return dt_; }
  int steps() const { return steps_; }
  double horizon() const { return dt_ * steps_; }
  double node(int k) const { return k * dt_; }

  std::vector<double> nodes() const {
    std::vector<double> t(steps_ + 1);
    for (int k = 0; k <= steps_; ++k) t[k] = node(k);
    return t;
  }

  /// First j steps of this grid (j >= 8).
  TimeGrid truncated(int j) const { return from_step(dt_, j); }

 private:
  TimeGrid() = default;
  double dt_ = 1.0;
  int steps_ = 8;
};

/// Snapshots u(t_k) at increasing times; node 0 holds the initial data.
struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> states;

  std::size_t size() const { return states.size(); }
  const BoxGrid& grid() const { return states.front().grid; }

  void push_back(double t, GridFunction u) {
    times.push_back(t);
    states.push_back(std::move(u));
  }
};

/// Node-wise difference a - b of two trajectories on the same nodes.
inline Trajectory difference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw PreconditionError("difference: trajectories differ in length");
  Trajectory out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.states[k].grid != b.states[k].grid) {
      throw PreconditionError("difference: trajectories live on different grids");
    }
    out.push_back(a.times[k], GridFunction(a.states[k].grid, a.states[k].values - b.states[k].values));
  }
  return out;
}

/// max_k ||u(t_k)||_inf.
inline double sup_norm(const Trajectory& traj) {
  double m = 0.0;
  for (const GridFunction& u : traj.states) m = std::max(m, u.values.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace fhw
