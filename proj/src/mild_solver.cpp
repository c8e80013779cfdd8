#include "fhw/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fhw {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite(const GridFunction& u) { return u.values.allFinite(); }

}  // namespace

GridFunction nonlinearity_eval(const GridFunction& u, const ModelParams& model) {
  GridFunction out(u.grid);
  if (model.gamma_sign == 0) return out;
  const GridFunction v =
      model.dealias && model.integer_power() ? inverse(dealias(forward(u))) : u;
  const double gamma = model.gamma_sign;
  const double rho = model.rho;
  if (model.form == NonlinearityForm::Signed) {
    out.values = v.values.unaryExpr(
        [=](double a) { return a == 0.0 ? 0.0 : gamma * std::pow(std::abs(a), rho - 1.0) * a; });
  } else {
    out.values = v.values.unaryExpr(
        [=](double a) { return a == 0.0 ? 0.0 : gamma * std::pow(std::abs(a), rho); });
  }
  return out;
}

DuhamelOperator::DuhamelOperator(const PropagatorContext& context, const TimeGrid& tgrid)
    : context_(context), tgrid_(tgrid) {
  const ModelParams& model = context.model();
  const double alpha = model.alpha;
  const double nu = model.nu;
  const int steps = tgrid.steps();
  const double dt = tgrid.dt();
  const MittagLefflerTable& e1 = context.ml_table(alpha + 1.0);
  const MittagLefflerTable& e2 = context.ml_table(alpha + 2.0);

  shell_slot_.assign(context.max_shell() + 1, -1);
  const auto& shells = context.shells();
  for (std::size_t s = 0; s < shells.size(); ++s) shell_slot_[shells[s]] = static_cast<int>(s);
  a_.resize(static_cast<Eigen::Index>(shells.size()), steps);
  c_.resize(static_cast<Eigen::Index>(shells.size()), steps);

  std::vector<double> i0(steps + 1);
  std::vector<double> i1(steps + 1);
  for (std::size_t s = 0; s < shells.size(); ++s) {
    const double lambda = context.shell_xi_sq(shells[s]);
    i0[0] = 0.0;
    i1[0] = 0.0;
    for (int j = 1; j <= steps; ++j) {
      const double w = tgrid.node(j);
      const double w_alpha = std::pow(w, alpha);
      const double x = lambda * w_alpha;
      const double v1 = e1(x);
      const double v2 = e2(x);
      i0[j] = nu * w_alpha * v1;
      i1[j] = nu * w_alpha * w * (v1 - v2);
    }
    for (int m = 0; m < steps; ++m) {
      const double lo = tgrid.node(m);
      const double hi = tgrid.node(m + 1);
      const double d0 = i0[m + 1] - i0[m];
      const double d1 = i1[m + 1] - i1[m];
      a_(static_cast<Eigen::Index>(s), m) = (hi * d0 - d1) / dt;
      c_(static_cast<Eigen::Index>(s), m) = (d1 - lo * d0) / dt;
    }
  }
}

SpectralField DuhamelOperator::evaluate_history(const std::vector<SpectralField>& f_hat,
                                                int k) const {
  if (k < 0 || k > tgrid_.steps()) throw PreconditionError("DuhamelOperator: node out of range");
  if (static_cast<int>(f_hat.size()) < k) {
    throw PreconditionError("DuhamelOperator: forcing history shorter than the node index");
  }
  const BoxGrid& grid = context_.grid();
  SpectralField acc(grid);
  const auto& shell = context_.shell_of_mode();
  const Eigen::Index modes = grid.total();
  for (int m = 0; m < k; ++m) {
    const auto a_col = a_.col(m);
    const auto c_col = c_.col(m);
    const auto& older = f_hat[k - m - 1].coeffs;
    if (m == 0) {
      for (Eigen::Index i = 0; i < modes; ++i) acc.coeffs[i] += c_col[shell_slot_[shell[i]]] * older[i];
      continue;
    }
    const auto& newer = f_hat[k - m].coeffs;
    for (Eigen::Index i = 0; i < modes; ++i) {
      const int slot = shell_slot_[shell[i]];
      acc.coeffs[i] += a_col[slot] * newer[i] + c_col[slot] * older[i];
    }
  }
  return acc;
}

void DuhamelOperator::add_newest(SpectralField& acc, const SpectralField& f) const {
  const auto& shell = context_.shell_of_mode();
  const auto a_col = a_.col(0);
  for (Eigen::Index i = 0; i < acc.coeffs.size(); ++i) {
    acc.coeffs[i] += a_col[shell_slot_[shell[i]]] * f.coeffs[i];
  }
}

SpectralField DuhamelOperator::evaluate(const std::vector<SpectralField>& f_hat, int k) const {
  if (static_cast<int>(f_hat.size()) <= k) {
    throw PreconditionError("DuhamelOperator: forcing history shorter than the node index");
  }
  SpectralField acc = evaluate_history(f_hat, k);
  if (k > 0) add_newest(acc, f_hat[k]);
  return acc;
}

GridFunction duhamel_term(const Trajectory& forcing, int t_index, const ModelParams& model) {
  if (t_index < 0 || static_cast<int>(forcing.size()) <= t_index) {
    throw PreconditionError("duhamel_term: history shorter than t_index");
  }
  if (t_index == 0) return GridFunction(forcing.grid());
  const double dt = forcing.times[1] - forcing.times[0];
  for (int k = 1; k <= t_index; ++k) {
    const double step = forcing.times[k] - forcing.times[k - 1];
    if (std::abs(step - dt) > 1e-12 * dt) {
      throw PreconditionError("duhamel_term: history nodes must be uniform");
    }
  }
  const PropagatorContext context(model, forcing.grid());
  const DuhamelOperator op(context, TimeGrid::from_step(dt, std::max(8, t_index)));
  std::vector<SpectralField> f_hat;
  f_hat.reserve(t_index + 1);
  for (int k = 0; k <= t_index; ++k) f_hat.push_back(forward(forcing.states[k]));
  return inverse(op.evaluate(f_hat, t_index));
}

PicardResult picard_solve(const GridFunction& u0, const ModelParams& model, const TimeGrid& tgrid,
                          const PicardOptions& options) {
  model.validate();
  if (!(options.tol > 0.0)) throw DomainError("picard_solve: tol must be positive");
  const TrajectoryNorm norm = options.norm ? options.norm : TrajectoryNorm(sup_norm);
  const PropagatorContext context(model, u0.grid);
  const int steps = tgrid.steps();

  const SpectralField u0_hat = forward(u0);
  std::vector<SpectralField> phi_hat;
  phi_hat.reserve(steps + 1);
  Trajectory phi;
  for (int k = 0; k <= steps; ++k) {
    phi_hat.push_back(context.propagate(u0_hat, tgrid.node(k)));
    phi.push_back(tgrid.node(k), k == 0 ? u0 : inverse(phi_hat.back()));
  }

  PicardResult result;
  PicardReport& report = result.report;
  report.epsilon = norm(phi);
  const double data_norm = u0.values.cwiseAbs().maxCoeff();
  report.L_meas = data_norm > 0.0 ? report.epsilon / data_norm : 0.0;
  report.norms.push_back(report.epsilon);
  report.differences.push_back(report.epsilon);
  report.iterate_count = 1;
  Trajectory current = phi;
  if (model.gamma_sign == 0 || report.epsilon == 0.0) {
    report.converged = true;
    report.message = "linear part only";
    result.trajectory = std::move(current);
    return result;
  }

  const DuhamelOperator op(context, tgrid);
  const double rho = model.rho;
  int growth = 0;
  std::vector<SpectralField> f_hat(steps + 1);
  for (int it = 2; it <= options.max_iter; ++it) {
    for (int k = 0; k <= steps; ++k) f_hat[k] = forward(nonlinearity_eval(current.states[k], model));
    Trajectory next;
    next.push_back(0.0, u0);
    for (int k = 1; k <= steps; ++k) {
      SpectralField u_hat = op.evaluate(f_hat, k);
      u_hat.coeffs += phi_hat[k].coeffs;
      next.push_back(tgrid.node(k), inverse(u_hat));
    }
    const double d = norm(difference(next, current));
    const double n_next = norm(next);
    const double d_prev = report.differences.back();
    report.iterate_count = it;
    if (!std::isfinite(d) || !std::isfinite(n_next)) {
      report.message = "non-finite iterate at iteration " + std::to_string(it);
      throw NonConvergenceError("picard_solve: " + report.message, report);
    }
    const double n_cur = report.norms.back();
    const double n_prev = report.norms.size() >= 2 ? report.norms[report.norms.size() - 2] : 0.0;
    const double scale = std::pow(n_cur, rho - 1.0) + std::pow(n_prev, rho - 1.0);
    if (d_prev > 0.0 && scale > 0.0) report.K_meas = std::max(report.K_meas, d / (d_prev * scale));
    if (d_prev > 10.0 * kEps * n_cur) report.ratios.push_back(d / d_prev);
    report.norms.push_back(n_next);
    report.differences.push_back(d);
    current = std::move(next);

    if (d <= options.tol * n_next) {
      report.converged = true;
      report.message = "converged";
      break;
    }
    growth = d > d_prev ? growth + 1 : 0;
    if (growth >= 3) {
      report.message = "successive differences grew three times in a row";
      throw NonConvergenceError("picard_solve: " + report.message, report);
    }
  }
  if (!report.converged) report.message = "iteration budget exhausted";
  result.trajectory = std::move(current);
  return result;
}

Trajectory march_solve(const GridFunction& u0, const ModelParams& model, const TimeGrid& tgrid,
                       int corrector_iters, double blowup_threshold) {
  model.validate();
  if (corrector_iters < 1) throw DomainError("march_solve: corrector_iters must be >= 1");
  const PropagatorContext context(model, u0.grid);
  const int steps = tgrid.steps();
  const SpectralField u0_hat = forward(u0);

  Trajectory traj;
  traj.push_back(0.0, u0);
  if (model.gamma_sign == 0) {
    for (int k = 1; k <= steps; ++k) {
      traj.push_back(tgrid.node(k), inverse(context.propagate(u0_hat, tgrid.node(k))));
    }
    return traj;
  }

  const DuhamelOperator op(context, tgrid);
  std::vector<SpectralField> f_hat(steps + 1);
  f_hat[0] = forward(nonlinearity_eval(u0, model));
  for (int k = 1; k <= steps; ++k) {
    SpectralField base = op.evaluate_history(f_hat, k);
    base.coeffs += context.propagate(u0_hat, tgrid.node(k)).coeffs;
    SpectralField u_hat = base;
    op.add_newest(u_hat, f_hat[k - 1]);
    GridFunction u = inverse(u_hat);
    for (int it = 0; it < corrector_iters && finite(u); ++it) {
      u_hat = base;
      op.add_newest(u_hat, forward(nonlinearity_eval(u, model)));
      u = inverse(u_hat);
    }
    if (!finite(u) || u.values.cwiseAbs().maxCoeff() > blowup_threshold) {
      throw BlowUpError("march_solve: solution left the admissible range at node " +
                            std::to_string(k),
                        k - 1, traj);
    }
    f_hat[k] = forward(nonlinearity_eval(u, model));
    traj.push_back(tgrid.node(k), std::move(u));
  }
  return traj;
}

DependenceReport continuous_dependence_check(const GridFunction& u0, const GridFunction& u0_bar,
                                             const ModelParams& model, const TimeGrid& tgrid,
                                             const XNormSpec& xnorm,
                                             const PicardOptions& options) {
  if (u0.grid != u0_bar.grid) throw PreconditionError("continuous_dependence_check: grids differ");
  const PicardResult a = picard_solve(u0, model, tgrid, options);
  const PicardResult b = picard_solve(u0_bar, model, tgrid, options);

  auto x_norm = [&](const Trajectory& traj) {
    return xqp_norm(traj, xnorm.p, xnorm.q, xnorm.mu, xnorm.eta, xnorm.sigma, xnorm.space);
  };
  const PropagatorContext context(model, u0.grid);
  const SpectralField h0 = forward(u0);
  const SpectralField h1 = forward(u0_bar);
  Trajectory phi_a;
  Trajectory phi_b;
  for (int k = 0; k <= tgrid.steps(); ++k) {
    const double t = tgrid.node(k);
    phi_a.push_back(t, k == 0 ? u0 : inverse(context.propagate(h0, t)));
    phi_b.push_back(t, k == 0 ? u0_bar : inverse(context.propagate(h1, t)));
  }
  const Trajectory linear_diff = difference(phi_a, phi_b);
  const Trajectory diff = difference(a.trajectory, b.trajectory);

  DependenceReport report;
  report.norm_u = x_norm(a.trajectory);
  report.norm_u_bar = x_norm(b.trajectory);
  report.epsilon = std::max(x_norm(phi_a), x_norm(phi_b));
  const double lin = x_norm(linear_diff);
  const double d = x_norm(diff);
  report.ratio = lin > 0.0 ? d / lin : 0.0;
  const double rho = model.rho;
  const double scale = std::pow(report.norm_u, rho - 1.0) + std::pow(report.norm_u_bar, rho - 1.0);
  if (d > 0.0 && scale > 0.0) {
    report.K_meas = x_norm(difference(diff, linear_diff)) / (d * scale);
  }
  const double denom = 1.0 - std::pow(2.0, rho) * report.K_meas * std::pow(report.epsilon, rho - 1.0);
  report.bound = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
  report.pass = report.ratio <= report.bound * (1.0 + 1e-9);
  return report;
}

}  // namespace fhw
