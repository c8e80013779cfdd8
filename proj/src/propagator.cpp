#include "fhw/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fhw {

namespace {

void check_propagator_order(double alpha, const char* who) {
  if (!(alpha >= 1.0 && alpha < 2.0)) {
    throw DomainError(std::string(who) + ": alpha must lie in [1, 2), got " +
                      std::to_string(alpha));
  }
}

int next_power_of_two(double v) {
  int p = 8;
  while (p < v && p < (1 << 22)) p <<= 1;
  return p;
}

}  // namespace

PropagatorContext::PropagatorContext(const ModelParams& model, const BoxGrid& grid,
                                     const MLParams& ml)
    : model_(model), grid_(grid), ml_(ml) {
  model_.validate();
  step_sq_ = grid_.frequency_step() * grid_.frequency_step();
  shell_of_mode_.resize(grid_.total());
  std::vector<char> present;
  for (Eigen::Index i = 0; i < grid_.total(); ++i) {
    const int m = static_cast<int>(grid_.wavenumber_norm2(i));
    shell_of_mode_[i] = m;
    if (m >= static_cast<int>(present.size())) present.resize(m + 1, 0);
    present[m] = 1;
  }
  max_shell_ = static_cast<int>(present.size()) - 1;
  for (int m = 0; m <= max_shell_; ++m) {
    if (present[m]) shells_.push_back(m);
  }
}

const MittagLefflerTable& PropagatorContext::ml_table(double b) const {
  std::lock_guard lock(mutex_);
  auto& slot = tables_[b];
  if (!slot) slot = std::make_unique<MittagLefflerTable>(model_.alpha, b, ml_);
  return *slot;
}

std::shared_ptr<const std::vector<double>> PropagatorContext::multipliers(double t) const {
  if (!(t >= 0.0)) throw DomainError("PropagatorContext: t must be nonnegative");
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  const MittagLefflerTable& table = ml_table(1.0);
  auto values = std::make_shared<std::vector<double>>(max_shell_ + 1, 0.0);
  const double t_alpha = std::pow(t, model_.alpha);
  for (int m : shells_) (*values)[m] = table(t_alpha * shell_xi_sq(m));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(t, std::move(values));
  return it->second;
}

std::size_t PropagatorContext::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

SpectralField PropagatorContext::propagate(const SpectralField& u0_hat, double t) const {
  if (u0_hat.grid != grid_) throw PreconditionError("propagate: field lives on another grid");
  if (t == 0.0) return u0_hat;
  const auto table = multipliers(t);
  SpectralField out(grid_);
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] = u0_hat.coeffs[i] * (*table)[shell_of_mode_[i]];
  }
  return out;
}

GridFunction PropagatorContext::propagate(const GridFunction& u0, double t) const {
  if (t == 0.0) return u0;
  return inverse(propagate(forward(u0), t));
}

GridFunction linear_propagate(const GridFunction& u0, double t, const ModelParams& model) {
  check_propagator_order(model.alpha, "linear_propagate");
  if (!(t >= 0.0)) throw DomainError("linear_propagate: t must be nonnegative");
  if (t == 0.0) return u0;
  const double t_alpha = std::pow(t, model.alpha);
  const double alpha = model.alpha;
  return inverse(apply_radial_multiplier(forward(u0), [&](double xi_sq) {
    return ml_one(alpha, t_alpha * xi_sq);
  }));
}

std::vector<double> kernel_sample_1d(double alpha, double t, std::span<const double> xs,
                                     KernelReport* report) {
  check_propagator_order(alpha, "kernel_sample_1d");
  if (!(t > 0.0)) throw DomainError("kernel_sample_1d: t must be positive");
  if (xs.empty()) return {};

  const double scale = std::pow(t, 0.5 * alpha);
  double reach = 0.0;
  for (double x : xs) reach = std::max(reach, std::abs(x));
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double gap = scale / 4.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double d = sorted[i] - sorted[i - 1];
    if (d > 0.0) gap = std::min(gap, d);
  }
  const double aux_half = 4.0 * std::max(reach, 10.0 * scale);
  const double aux_step = std::min(gap, scale / 2.0) / 8.0;
  const int aux_points = next_power_of_two(2.0 * aux_half / aux_step);
  const BoxGrid aux(1, aux_points, aux_half);

  // Tail of E_alpha(-t^alpha xi^2): A1 / (xi^2 + a^2) + B / (xi^2 + a^2)^2.
  const double a = 1.0 / scale;
  const double a2 = a * a;
  const double A1 = std::pow(t, -alpha) * reciprocal_gamma(1.0 - alpha);
  const double A2 = -std::pow(t, -2.0 * alpha) * reciprocal_gamma(1.0 - 2.0 * alpha);
  const double B = A2 + A1 * a2;
  auto tail = [&](double xi_sq) {
    const double d = xi_sq + a2;
    return A1 / d + B / (d * d);
  };

  const MittagLefflerTable table(alpha, 1.0);
  const double t_alpha = std::pow(t, alpha);
  SpectralField remainder(aux);
  double edge = 0.0;
  for (int i = 0; i < aux_points; ++i) {
    const double xi = aux.frequency_step() * aux.wavenumber(0, i);
    const double xi_sq = xi * xi;
    const double r = table(t_alpha * xi_sq) - tail(xi_sq);
    remainder.coeffs[i] = r;
    if (i == aux_points / 2) edge = std::abs(r) * std::abs(xi);
  }
  const GridFunction r_x = inverse(remainder);

  std::vector<double> out;
  out.reserve(xs.size());
  const double h = aux.spacing(0);
  for (double x : xs) {
    // Four-point Lagrange interpolation on the periodic auxiliary grid.
    const double pos = (x + aux_half) / h;
    const int base = static_cast<int>(std::floor(pos)) - 1;
    const double s = pos - (base + 1);
    double value = 0.0;
    const double w[4] = {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                         -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
    for (int k = 0; k < 4; ++k) {
      const int j = ((base + k) % aux_points + aux_points) % aux_points;
      value += w[k] * r_x.values[j];
    }
    const double ax = a * std::abs(x);
    const double decay = std::exp(-ax);
    value += A1 * decay / (2.0 * a) + B * (1.0 + ax) * decay / (4.0 * a2 * a);
    out.push_back(value);
  }
  if (report) {
    report->tail_truncation = edge / (5.0 * std::numbers::pi);
    report->aux_half_length = aux_half;
    report->aux_points = aux_points;
  }
  return out;
}

double duhamel_multiplier(double alpha, double nu, double dt_lag, double xi_sq) {
  check_propagator_order(alpha, "duhamel_multiplier");
  if (!(dt_lag > 0.0)) throw DomainError("duhamel_multiplier: lag must be positive");
  if (!(xi_sq >= 0.0)) throw DomainError("duhamel_multiplier: |xi|^2 must be nonnegative");
  return nu * std::pow(dt_lag, alpha - 1.0) *
         ml_two(alpha, alpha, std::pow(dt_lag, alpha) * xi_sq);
}

std::vector<double> smalltime_pairing_check(const GridFunction& u0, const GridFunction& v,
                                            std::span<const double> ts, const ModelParams& model) {
  if (u0.grid != v.grid) throw PreconditionError("smalltime_pairing_check: grids differ");
  const PropagatorContext ctx(model, u0.grid);
  const SpectralField u0_hat = forward(u0);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const GridFunction ut = inverse(ctx.propagate(u0_hat, t));
    const double pairing = u0.grid.cell_volume() * (ut.values - u0.values).dot(v.values);
    out.push_back(std::abs(pairing));
  }
  return out;
}

}  // namespace fhw
