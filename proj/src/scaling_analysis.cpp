#include "fhw/scaling_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "fhw/special_functions.hpp"

namespace fhw {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_ranges(int n, double alpha, double rho, double mu) {
  if (n < 1) throw DomainError("validate_params: n must be >= 1");
  if (!(alpha >= 1.0 && alpha < 2.0)) throw DomainError("validate_params: alpha must lie in [1, 2)");
  if (!(rho > 1.0)) throw DomainError("validate_params: rho must exceed 1");
  if (!(mu >= 0.0 && mu < n)) throw DomainError("validate_params: mu must lie in [0, n)");
}

}  // namespace

DerivedExponents DerivedExponents::compute(int n, double alpha, double rho, double p, double q,
                                           double mu) {
  const double dim = n - mu;
  const double crit = 2.0 / (rho - 1.0);
  DerivedExponents e;
  e.eta = 0.5 * alpha * (crit - dim / q);
  e.sigma = dim / p - crit;
  e.s_tilde = rho * dim / q - crit;
  e.gamma1 = -0.5 * alpha * e.s_tilde;
  e.gamma2 = -0.5 * alpha * (rho - 1.0) * dim / q;
  e.l = dim / p - dim / q;
  e.delta = e.l - e.sigma;
  const double r1 = e.identity1(alpha, rho);
  const double r2 = e.identity2(alpha, rho);
  const double scale = 1.0 + std::abs(alpha) + std::abs(e.eta * rho);
  if (std::abs(r1) > 1e-12 * scale || std::abs(r2) > 1e-12 * scale) {
    throw ConsistencyError("DerivedExponents: exponent identities violated (" + fmt(r1) + ", " +
                           fmt(r2) + ")");
  }
  return e;
}

ParamVerdict validate_params(int n, double alpha, double rho, double p, double q, double mu) {
  check_ranges(n, alpha, rho, mu);
  ParamVerdict v;
  v.exponents = DerivedExponents::compute(n, alpha, rho, p, q, mu);
  const DerivedExponents& e = v.exponents;
  const double dim = n - mu;
  const double lower = 2.0 / (rho - 1.0) - 2.0 / (alpha * rho);
  const double upper = 2.0 / (alpha * (rho - 1.0));
  auto add = [&](std::string name, bool holds, std::string detail) {
    if (!holds) v.reasons.push_back(name + ": " + detail);
    v.conditions.push_back({std::move(name), holds, std::move(detail)});
  };
  add("lower window", lower < dim / q,
      "(n-mu)/q = " + fmt(dim / q) + " must exceed 2/(rho-1) - 2/(alpha rho) = " + fmt(lower));
  add("upper window", dim / q < upper,
      "(n-mu)/q = " + fmt(dim / q) + " must be below 2/(alpha(rho-1)) = " + fmt(upper));
  add("data exponent", dim / p < 2.0 / (rho - 1.0),
      "(n-mu)/p = " + fmt(dim / p) + " must be below 2/(rho-1) = " + fmt(2.0 / (rho - 1.0)));
  add("1 < p <= q", p > 1.0 && p <= q, "p = " + fmt(p) + ", q = " + fmt(q));
  add("1 < rho <= q", rho > 1.0 && rho <= q, "rho = " + fmt(rho) + ", q = " + fmt(q));
  add("eta rho < 1", e.eta * rho < 1.0, "eta rho = " + fmt(e.eta * rho));
  add("gamma1 > -1", e.gamma1 > -1.0, "gamma1 = " + fmt(e.gamma1));
  add("gamma2 > -1", e.gamma2 > -1.0, "gamma2 = " + fmt(e.gamma2));
  v.admissible = v.reasons.empty();
  return v;
}

BetaIdentityReport beta_identity_check(const DerivedExponents& e, double alpha, double rho) {
  BetaIdentityReport r;
  r.residual1 = e.identity1(alpha, rho);
  r.residual2 = e.identity2(alpha, rho);
  r.identities_hold = std::abs(r.residual1) <= 1e-12 && std::abs(r.residual2) <= 1e-12;
  if (alpha == 1.0) {
    r.note = "delta-limit, skipped";
    return r;
  }
  const double x1 = 1.0 - e.eta * rho;
  const double x2 = alpha - e.eta * rho;
  const double y2 = e.gamma1 + 1.0;
  if (x1 > 0.0) r.beta1 = beta_fn(x1, alpha - 1.0);
  if (x2 > 0.0 && y2 > 0.0) r.beta2 = beta_fn(x2, y2);
  r.note = r.beta1 && r.beta2 ? "finite" : "beta argument outside (0, inf)";
  return r;
}

DecayFit decay_fit(const Trajectory& traj, double q, double mu, const DerivedExponents& e,
                   const SpaceParams& space, double exclude, double min_decades) {
  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] > 0.0) usable.push_back(k);
  }
  const std::size_t cut = static_cast<std::size_t>(std::floor(exclude * usable.size()));
  if (usable.size() < 2 * cut + 3) throw PreconditionError("decay_fit: too few nodes");
  DecayFit fit;
  fit.expected = -e.eta;
  for (std::size_t i = cut; i + cut < usable.size(); ++i) {
    const std::size_t k = usable[i];
    const double value = morrey_norm(traj.states[k], q, mu, space).value;
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw FitError("decay_fit: norm at t = " + fmt(traj.times[k]) + " is not positive");
    }
    fit.times.push_back(traj.times[k]);
    fit.norms.push_back(value);
  }
  fit.decades = std::log10(fit.times.back() / fit.times.front());
  if (fit.decades < min_decades) {
    throw PreconditionError("decay_fit: window spans " + fmt(fit.decades) + " decades, need " +
                            fmt(min_decades));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(fit.times.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = std::log(fit.times[i]);
    A(i, 1) = 1.0;
    b[i] = std::log(fit.norms[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  fit.slope = coef[0];
  fit.intercept = coef[1];
  fit.relative_error = fit.expected != 0.0 ? std::abs(fit.slope - fit.expected) / std::abs(fit.expected)
                                           : std::abs(fit.slope);
  return fit;
}

GridFunction homogeneous_data(const BoxGrid& grid, double rho, double amplitude, double eps) {
  const double power = -1.0 / (rho - 1.0);
  return GridFunction::sample(grid, [&](const Frequency& x) {
    return amplitude * std::pow(x.squaredNorm() + eps * eps, power);
  });
}

SelfSimilarityReport self_similarity_check(const ModelParams& model, const TimeGrid& tgrid,
                                           int lambda, const SelfSimilaritySetup& setup) {
  if (lambda != 1 && lambda != 2) {
    throw PreconditionError("self_similarity_check: only lambda = 1 or 2 maps the grids onto each other");
  }
  model.validate();
  const BoxGrid box_a(setup.n, setup.points, setup.half_length);
  const BoxGrid box_b(setup.n, setup.points, setup.half_length / lambda);
  const double time_scale = std::pow(static_cast<double>(lambda), 2.0 / model.alpha);
  const TimeGrid grid_b = TimeGrid::from_step(tgrid.dt() / time_scale, tgrid.steps());

  const Trajectory ua = march_solve(homogeneous_data(box_a, model.rho, setup.amplitude, setup.mollification),
                                    model, tgrid, setup.corrector_iters);
  const Trajectory ub =
      lambda == 1 ? ua
                  : march_solve(homogeneous_data(box_b, model.rho, setup.amplitude, setup.mollification),
                                model, grid_b, setup.corrector_iters);
  const double factor = std::pow(static_cast<double>(lambda), 2.0 / (model.rho - 1.0));

  SelfSimilarityReport report;
  report.first_node = -1;
  for (int k = 0; k <= tgrid.steps(); ++k) {
    if (tgrid.node(k) < setup.window_start * tgrid.horizon()) continue;
    if (report.first_node < 0) report.first_node = k;
    const double scale = ub.states[k].values.cwiseAbs().maxCoeff();
    const double gap = (ub.states[k].values - factor * ua.states[k].values).cwiseAbs().maxCoeff();
    const double d = scale > 0.0 ? gap / scale : gap;
    report.times.push_back(tgrid.node(k));
    report.per_node.push_back(d);
    report.defect = std::max(report.defect, d);
  }
  return report;
}

SignedPermutation SignedPermutation::identity(int n) {
  SignedPermutation M;
  for (int a = 0; a < n; ++a) {
    M.perm.push_back(a);
    M.sign.push_back(1);
  }
  return M;
}

SignedPermutation SignedPermutation::reflection(int n, int axis) {
  SignedPermutation M = identity(n);
  M.sign.at(axis) = -1;
  return M;
}

SignedPermutation SignedPermutation::swap(int n, int a, int b) {
  SignedPermutation M = identity(n);
  std::swap(M.perm.at(a), M.perm.at(b));
  return M;
}

GridFunction compose(const GridFunction& u, const SignedPermutation& M) {
  const BoxGrid& grid = u.grid;
  const int n = grid.dim();
  if (static_cast<int>(M.perm.size()) != n || static_cast<int>(M.sign.size()) != n) {
    throw PreconditionError("compose: permutation size does not match the grid dimension");
  }
  std::vector<int> seen(n, 0);
  for (int a = 0; a < n; ++a) {
    const int src = M.perm[a];
    if (src < 0 || src >= n || seen[src]++ || std::abs(M.sign[a]) != 1) {
      throw PreconditionError("compose: not a signed permutation");
    }
    if (grid.size(a) != grid.size(src)) {
      throw PreconditionError("compose: permutation does not map the grid onto itself");
    }
  }
  GridFunction out(grid);
  for (Eigen::Index flat = 0; flat < grid.total(); ++flat) {
    const auto idx = grid.unflatten(flat);
    std::array<int, 3> src{0, 0, 0};
    for (int a = 0; a < n; ++a) {
      const int i = idx[M.perm[a]];
      const int N = grid.size(a);
      src[a] = M.sign[a] > 0 ? i : (N - i) % N;
    }
    out.values[flat] = u.values[grid.flatten(src)];
  }
  return out;
}

double symmetry_check(const Trajectory& traj, const SignedPermutation& M, Parity parity) {
  double worst = 0.0;
  for (const GridFunction& u : traj.states) {
    const double scale = u.values.cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    const GridFunction um = compose(u, M);
    const Eigen::VectorXd gap =
        parity == Parity::Odd ? (um.values + u.values).eval() : (um.values - u.values).eval();
    worst = std::max(worst, gap.cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

AsymptoticReport asymptotic_equivalence_check(const GridFunction& u0, const GridFunction& v0,
                                              const ModelParams& model, const TimeGrid& tgrid,
                                              const DerivedExponents& e,
                                              const AsymptoticOptions& options) {
  if (u0.grid != v0.grid) throw PreconditionError("asymptotic_equivalence_check: grids differ");
  const PicardResult u = picard_solve(u0, model, tgrid, options.picard);
  const PicardResult v = picard_solve(v0, model, tgrid, options.picard);
  const PropagatorContext context(model, u0.grid);
  const SpectralField w0_hat = forward(GridFunction(u0.grid, u0.values - v0.values));

  const XNormSpec& x = options.xnorm;
  const LPPartition partition(u0.grid, x.space.j_min, x.space.j_max);
  const double inf = std::numeric_limits<double>::infinity();
  auto besov = [&](const GridFunction& f) {
    return f.values.cwiseAbs().maxCoeff() == 0.0
               ? 0.0
               : besov_morrey_norm(f, e.sigma, x.p, x.mu, inf, x.space, &partition).value;
  };
  auto morrey = [&](const GridFunction& f, double t) {
    return std::pow(t, e.eta) * morrey_norm(f, x.q, x.mu, x.space).value;
  };

  AsymptoticReport r;
  for (int k = 1; k <= tgrid.steps(); ++k) {
    const double t = tgrid.node(k);
    const GridFunction d(u0.grid, u.trajectory.states[k].values - v.trajectory.states[k].values);
    const GridFunction lin = inverse(context.propagate(w0_hat, t));
    r.times.push_back(t);
    r.a1_besov.push_back(besov(d));
    r.a1_morrey.push_back(morrey(d, t));
    r.a2_besov.push_back(besov(lin));
    r.a2_morrey.push_back(morrey(lin, t));
    auto gap = [](double a, double b) {
      const double s = std::max(std::abs(a), std::abs(b));
      return s > 0.0 ? std::abs(a - b) / s : 0.0;
    };
    r.max_gap = std::max({r.max_gap, gap(r.a1_besov.back(), r.a2_besov.back()),
                          gap(r.a1_morrey.back(), r.a2_morrey.back())});
  }
  if (!r.times.empty()) {
    r.a1_below = r.a1_besov.back() < options.tol && r.a1_morrey.back() < options.tol;
    r.a2_below = r.a2_besov.back() < options.tol && r.a2_morrey.back() < options.tol;
  }
  r.consistent = r.a1_below == r.a2_below;
  return r;
}

}  // namespace fhw
