// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.

#include <fhw/mild_solver.hpp>
#include <fhw/morrey_norms.hpp>
#include <fhw/propagator.hpp>
#include <fhw/scaling_analysis.hpp>
#include <fhw/special_functions.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace fhw;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ModelParams cubic(double alpha, int gamma) {
  ModelParams m;
  m.alpha = alpha;
  m.rho = 3.0;
  m.gamma_sign = gamma;
  return m;
}

constexpr double kP = 3.0;
constexpr double kQ = 3.2;

Outcome mittag_leffler_correctness() {
  double worst = 0.0;
  bool paths_ok = true;
  for (double alpha : {1.0, 1.1, 1.5, 1.9}) {
    for (int i = 0; i <= 500; ++i) {
      const double x = 0.1 * i;
      const MLValue v = ml_one_eval(alpha, x);
      const double ref = oracle::ml_series(alpha, 1.0, x);
      worst = std::max(worst, std::abs(v.value - ref) / std::abs(ref));
      if (alpha > 1.0 && x > MLParams{}.x_switch) paths_ok = paths_ok && v.path == MLPath::Decomposition;
    }
  }
  double exp_err = 0.0;
  double cos_err = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double x = 0.1 * i;
    exp_err = std::max(exp_err, std::abs(ml_one(1.0, x) - std::exp(-x)) / std::exp(-x));
    cos_err = std::max(cos_err, std::abs(ml_one(2.0, x) - std::cos(std::sqrt(x))));
  }
  return {worst <= 1e-8 && exp_err <= 1e-10 && cos_err <= 1e-10 && paths_ok,
          "series oracle rel " + fmt(worst) + " (<= 1e-8), exp rel " + fmt(exp_err) +
              ", cos sqrt abs " + fmt(cos_err) + " (<= 1e-10)" +
              (paths_ok ? "" : ", decomposition path not taken")};
}

Outcome boundedness() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> alpha_dist(1.0, 2.0);
  std::uniform_real_distribution<double> lin(0.0, 100.0);
  std::uniform_real_distribution<double> log10x(-6.0, 6.0);
  int violations = 0;
  double largest = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double alpha = alpha_dist(rng);
    const double x = i % 2 == 0 ? lin(rng) : std::pow(10.0, log10x(rng));
    const double v = std::abs(ml_one(alpha, x));
    largest = std::max(largest, v);
    if (!(v <= 1.0)) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in 10^4 samples, max |E| = " + fmt(largest)};
}

Outcome duhamel_equivalence() {
  const BoxGrid grid(1, 8, std::numbers::pi);  // frequency step 1
  const int steps = 16;
  const double T = 2.0;
  const double dt = T / steps;
  std::vector<double> f(steps + 1);
  for (int k = 0; k <= steps; ++k) f[k] = 0.5 + std::cos(2.0 * k * dt) + 0.3 * k * dt;
  const Eigen::Index origin = grid.size(0) / 2;

  double worst = 0.0;
  for (double alpha : {1.25, 1.5, 1.75}) {
    const ModelParams model = cubic(alpha, 1);
    Trajectory forcing;
    for (int k = 0; k <= steps; ++k) {
      forcing.push_back(k * dt, GridFunction::sample(grid, [&](const Frequency& x) { return f[k] * std::cos(x[0]); }));
    }
    double diff = 0.0;
    double scale = 0.0;
    for (int k = 1; k <= steps; ++k) {
      const double lib = duhamel_term(forcing, k, model).values[origin];
      const double ref = oracle::nested_duhamel(alpha, model.nu, 1.0, f, dt, k);
      diff = std::max(diff, std::abs(lib - ref));
      scale = std::max(scale, std::abs(ref));
    }
    worst = std::max(worst, diff / scale);
  }
  return {worst <= 1e-3, "max relative deviation " + fmt(worst) + " (<= 1e-3)"};
}

Outcome heat_reduction() {
  const BoxGrid grid(1, 64, 8.0);
  const double T = 1.0;
  const int steps = 64;
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return 0.2 * std::exp(-x.squaredNorm()); });
  const std::vector<double> start(u0.values.data(), u0.values.data() + u0.values.size());
  double worst = 0.0;
  std::ostringstream detail;
  for (int gamma : {0, 1}) {
    const Trajectory lib = march_solve(u0, cubic(1.0, gamma), TimeGrid(T, steps));
    const auto ref = oracle::heat_ifrk4(start, grid.half_length(), T, steps, 50, gamma, 3.0);
    double err = 0.0;
    for (int k = 0; k <= steps; ++k) {
      for (Eigen::Index i = 0; i < grid.total(); ++i) err = std::max(err, std::abs(lib.states[k].values[i] - ref[k][i]));
    }
    worst = std::max(worst, err);
    detail << "gamma " << gamma << ": " << fmt(err) << "; ";
  }
  detail << "(<= 1e-6)";
  return {worst <= 1e-6, detail.str()};
}

Outcome contraction() {
  const ModelParams model = cubic(1.5, 1);
  const BoxGrid grid(2, 32, 8.0);
  const TimeGrid tgrid(1.0, 32);
  auto data = [&](double amplitude) {
    return GridFunction::sample(grid, [=](const Frequency& x) { return amplitude * std::exp(-x.squaredNorm()); });
  };
  const PicardReport r = picard_solve(data(0.1), model, tgrid).report;
  double worst = 0.0;
  for (double ratio : r.ratios) worst = std::max(worst, ratio);
  bool flagged = false;
  try {
    picard_solve(data(10.0), model, tgrid);
  } catch (const NonConvergenceError&) {
    flagged = true;
  }
  return {r.converged && !r.ratios.empty() && worst <= 0.5 && flagged,
          "max ratio " + fmt(worst) + " over " + std::to_string(r.ratios.size()) +
              " ratios (<= 0.5), x100 nonconvergence " + (flagged ? "reported" : "missed")};
}

Outcome symmetry() {
  const ModelParams model = cubic(1.5, 1);
  const BoxGrid grid(2, 32, 8.0);
  const TimeGrid tgrid(1.0, 32);
  const double k0 = grid.frequency_step();
  const GridFunction even = GridFunction::sample(grid, [&](const Frequency& x) {
    return 0.5 * std::exp(-x.squaredNorm()) * (1.0 + 0.5 * std::cos(2.0 * k0 * x[0]) + 0.3 * std::sin(k0 * x[1]));
  });
  const GridFunction odd = GridFunction::sample(grid, [&](const Frequency& x) {
    return 0.5 * std::sin(k0 * x[0]) * std::exp(-0.25 * x.squaredNorm()) * (1.0 + 0.3 * std::cos(k0 * x[1]));
  });
  const SignedPermutation reflect = SignedPermutation::reflection(2, 0);
  const double ve = symmetry_check(march_solve(even, model, tgrid), reflect, Parity::Even);
  const double vo = symmetry_check(march_solve(odd, model, tgrid), reflect, Parity::Odd);
  return {ve <= 1e-8 && vo <= 1e-8, "even " + fmt(ve) + ", odd " + fmt(vo) + " (<= 1e-8)"};
}

Outcome self_similarity() {
  SelfSimilaritySetup setup;
  setup.n = 2;
  setup.points = 64;
  setup.half_length = 8.0;
  setup.amplitude = 0.05;
  setup.mollification = 0.25;
  setup.window_start = 0.5;
  const TimeGrid tgrid(24.0, 64);
  bool pass = true;
  std::ostringstream detail;
  for (int gamma : {0, 1}) {
    const ModelParams model = cubic(1.5, gamma);
    SelfSimilaritySetup finer = setup;
    finer.mollification = 0.5 * setup.mollification;
    const double coarse = self_similarity_check(model, tgrid, 2, setup).defect;
    const double fine = self_similarity_check(model, tgrid, 2, finer).defect;
    const double ratio = fine / coarse;
    pass = pass && coarse <= 0.05 && fine <= 0.05 && std::abs(ratio - 0.5) <= 0.1;
    detail << (gamma == 0 ? "linear " : "nonlinear ") << fmt(coarse) << " -> " << fmt(fine) << " (ratio "
           << fmt(ratio) << "); ";
  }
  detail << "defect <= 0.05, ratio in [0.4, 0.6]";
  return {pass, detail.str()};
}

Outcome decay_exponent() {
  const ModelParams model = cubic(1.5, 0);
  const BoxGrid grid(2, 1024, 64.0);
  const PropagatorContext context(model, grid);
  const SpectralField u0_hat = forward(homogeneous_data(grid, model.rho, 1.0, 0.125));
  Trajectory traj;
  const int count = 25;
  for (int k = 0; k < count; ++k) {
    const double t = std::pow(80.0, static_cast<double>(k) / (count - 1));
    traj.push_back(t, inverse(context.propagate(u0_hat, t)));
  }
  const DerivedExponents e = DerivedExponents::compute(2, model.alpha, model.rho, kP, kQ, 0.0);
  const DecayFit fit = decay_fit(traj, kQ, 0.0, e);
  return {fit.relative_error <= 0.1, "slope " + fmt(fit.slope) + " vs -eta = " + fmt(fit.expected) +
                                         ", relative " + fmt(fit.relative_error) + " (<= 0.1)"};
}

Outcome exponent_identities() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0;
  long attempts = 0;
  double worst = 0.0;
  double formula_gap = 0.0;
  while (accepted < 1000 && attempts < 10000000) {
    ++attempts;
    const int n = 1 + static_cast<int>(3.0 * u(rng)) % 3;
    const double alpha = 1.0 + u(rng);
    const double rho = 1.0 + 5.0 * u(rng);
    const double mu = n * 0.99 * u(rng);
    const double lower = std::max(0.0, 2.0 / (rho - 1.0) - 2.0 / (alpha * rho));
    const double upper = 2.0 / (alpha * (rho - 1.0));
    if (!(upper > lower)) continue;
    const double theta = lower + (upper - lower) * u(rng);  // (n - mu)/q
    const double q = (n - mu) / theta;
    const double p_floor = std::max(1.0, (n - mu) * (rho - 1.0) / 2.0);
    const double p = p_floor + (q - p_floor) * u(rng);
    const ParamVerdict v = validate_params(n, alpha, rho, p, q, mu);
    if (!v.admissible) continue;
    ++accepted;
    const DerivedExponents& e = v.exponents;
    worst = std::max({worst, std::abs(alpha + e.gamma1 - e.eta * rho),
                      std::abs(alpha + e.gamma2 - e.eta * rho + e.eta)});
    const double eta = 0.5 * alpha * (2.0 / (rho - 1.0) - (n - mu) / q);
    formula_gap = std::max(formula_gap, std::abs(e.eta - eta));
  }
  return {accepted == 1000 && worst <= 1e-12 && formula_gap <= 1e-12,
          std::to_string(accepted) + " admissible tuples, max residual " + fmt(worst) + " (<= 1e-12)"};
}

Outcome morrey_oracle() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  int grids = 0;
  const std::vector<std::pair<int, int>> shapes{{1, 8}, {1, 16}, {1, 32}, {2, 8}, {2, 16}, {2, 32}, {3, 8}, {3, 16}};
  for (auto [n, N] : shapes) {
    const BoxGrid grid(n, N, 2.0);
    GridFunction f(grid);
    for (Eigen::Index i = 0; i < grid.total(); ++i) f.values[i] = normal(rng);
    const std::vector<double> vals(f.values.data(), f.values.data() + f.values.size());
    for (auto [p, mu] : {std::pair{1.0, 0.0}, std::pair{2.0, 0.5}, std::pair{3.0, 0.9}}) {
      const double ref = oracle::morrey_sorted(vals, grid.sizes(), grid.half_length(), p, mu);
      const NormReport fast = morrey_norm(f, p, mu);
      worst = std::max(worst, std::abs(fast.value - ref) / ref);
      if (!fast.exhaustive) worst = 1.0;
      if (grid.total() <= 1024) {
        worst = std::max(worst, std::abs(morrey_norm_brute_force(f, p, mu).value - ref) / ref);
      }
    }
    ++grids;
  }

  double scaling = 0.0;
  for (int n : {1, 2}) {
    const BoxGrid wide(n, 32, 8.0);
    const BoxGrid narrow(n, 32, 4.0);
    auto profile = [](const Frequency& x) { return std::exp(-x.squaredNorm()) * (1.0 + 0.3 * std::cos(x[0])); };
    const GridFunction f = GridFunction::sample(wide, profile);
    // g(x) = f(2x) on the half-size box takes the same nodal values.
    const GridFunction g(narrow, f.values);
    for (auto [p, mu] : {std::pair{2.0, 0.5}, std::pair{3.0, 0.0}}) {
      const double expected = std::pow(2.0, -(n - mu) / p) * morrey_norm(f, p, mu).value;
      scaling = std::max(scaling, std::abs(morrey_norm(g, p, mu).value - expected) / expected);
    }
  }
  return {worst <= 1e-12 && scaling <= 0.01, std::to_string(grids) + " grids, max relative gap " + fmt(worst) +
                                                 " (<= 1e-12); scaling law " + fmt(scaling) + " (<= 0.01)"};
}

Outcome holder() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal;
  const BoxGrid grid(2, 16, 4.0);
  int violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f(grid), g(grid);
    for (Eigen::Index i = 0; i < grid.total(); ++i) {
      f.values[i] = normal(rng);
      g.values[i] = normal(rng) * std::exp(-0.2 * grid.position(i).squaredNorm());
    }
    // 1/p1 + 1/p2 <= 1 keeps the product exponent p3 >= 1.
    const double a = 0.05 + 0.9 * u(rng);
    const double b = 0.02 + (0.98 - a) * u(rng);
    const double p1 = 1.0 / a;
    const double p2 = 1.0 / b;
    const double mu1 = 1.9 * u(rng);
    const double mu2 = 1.9 * u(rng);
    const HolderCheck h = check_holder(f, g, p1, mu1, p2, mu2);
    if (h.lhs > h.rhs * (1.0 + 1e-9)) ++violations;
    tightest = std::max(tightest, h.lhs / h.rhs);
  }
  return {violations == 0, std::to_string(violations) + " violations in 100 pairs, max lhs/rhs " + fmt(tightest)};
}

Outcome kernel_checks() {
  const double h = 0.002;
  std::vector<double> xs;
  for (int i = -20000; i <= 20000; ++i) xs.push_back(i * h);
  const std::vector<double> probe = [] {
    std::vector<double> p;
    for (int i = -60; i <= 60; ++i) p.push_back(0.1 * i);
    return p;
  }();
  double mass_err = 0.0;
  double minimum = 1.0;
  double collapse = 0.0;
  for (double alpha : {1.1, 1.25, 1.5, 1.75, 1.9}) {
    const auto k1 = kernel_sample_1d(alpha, 1.0, xs);
    double mass = 0.0;
    for (double v : k1) mass += h * v;
    mass_err = std::max(mass_err, std::abs(mass - 1.0));
    for (double v : k1) minimum = std::min(minimum, v);
    const double t = 4.0;
    const double scale = std::pow(t, 0.5 * alpha);
    std::vector<double> stretched;
    for (double x : probe) stretched.push_back(x / scale);
    const auto kt = kernel_sample_1d(alpha, t, probe);
    const auto ks = kernel_sample_1d(alpha, 1.0, stretched);
    for (std::size_t i = 0; i < probe.size(); ++i) collapse = std::max(collapse, std::abs(kt[i] - ks[i] / scale));
  }
  return {mass_err <= 1e-6 && minimum >= -1e-6 && collapse <= 1e-6,
          "mass " + fmt(mass_err) + ", min " + fmt(minimum) + ", collapse " + fmt(collapse) + " (1e-6)"};
}

Outcome asymptotic_equivalence() {
  const BoxGrid grid(2, 64, 8.0);
  const double k0 = grid.frequency_step();
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return 0.1 * std::exp(-x.squaredNorm()); });
  const GridFunction v0 = GridFunction::sample(grid, [&](const Frequency& x) {
    return 0.1 * std::exp(-x.squaredNorm()) + 0.05 * std::exp(-x.squaredNorm()) * std::cos(16.0 * k0 * x[0]);
  });
  const DerivedExponents e = DerivedExponents::compute(2, 1.5, 3.0, kP, kQ, 0.0);
  AsymptoticOptions options;
  options.xnorm.p = kP;
  options.xnorm.q = kQ;
  options.xnorm.eta = e.eta;
  options.xnorm.sigma = e.sigma;
  const TimeGrid tgrid(4.0, 32);
  const AsymptoticReport nl = asymptotic_equivalence_check(u0, v0, cubic(1.5, 1), tgrid, e, options);
  const AsymptoticReport lin = asymptotic_equivalence_check(u0, v0, cubic(1.5, 0), tgrid, e, options);
  const double a1 = std::max(nl.a1_besov.back(), nl.a1_morrey.back());
  const double a2 = std::max(nl.a2_besov.back(), nl.a2_morrey.back());
  const double start = std::max(nl.a1_besov.front(), nl.a1_morrey.front());
  return {a1 <= 1e-3 && a2 <= 1e-3 && lin.max_gap <= 1e-12,
          "A1 " + fmt(start) + " -> " + fmt(a1) + ", A2 -> " + fmt(a2) + " (<= 1e-3); gamma = 0 gap " +
              fmt(lin.max_gap) + " (<= 1e-12)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Mittag-Leffler correctness", mittag_leffler_correctness},
      {"Mittag-Leffler boundedness", boundedness},
      {"Duhamel closed form vs nested integral", duhamel_equivalence},
      {"alpha = 1 heat reduction", heat_reduction},
      {"Picard contraction", contraction},
      {"symmetry preservation", symmetry},
      {"self-similarity", self_similarity},
      {"decay exponent", decay_exponent},
      {"exponent identities", exponent_identities},
      {"Morrey norm oracle and scaling", morrey_oracle},
      {"Holder inequality", holder},
      {"kernel checks", kernel_checks},
      {"asymptotic equivalence", asymptotic_equivalence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
