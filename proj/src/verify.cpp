#include "fhw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "fhw/mild_solver.hpp"
#include "fhw/morrey_norms.hpp"
#include "fhw/propagator.hpp"
#include "fhw/scaling_analysis.hpp"
#include "fhw/special_functions.hpp"

namespace fhw {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  void at_most(std::string check, double value, double threshold, std::string detail = {}) {
    add(std::move(check), value, "<=", threshold, value <= threshold, std::move(detail));
  }
  void at_least(std::string check, double value, double threshold, std::string detail = {}) {
    add(std::move(check), value, ">=", threshold, value >= threshold, std::move(detail));
  }
  void holds(std::string check, bool ok, std::string detail = {}) {
    add(std::move(check), ok ? 1.0 : 0.0, "==", 1.0, ok, std::move(detail));
  }

  std::vector<Verdict> take() { return std::move(out_); }

 private:
  void add(std::string check, double value, const char* rel, double threshold, bool pass,
           std::string detail) {
    if (!std::isfinite(value)) pass = false;
    out_.push_back({name_, std::move(check), value, rel, threshold, pass, std::move(detail)});
  }

  std::string name_;
  std::vector<Verdict> out_;
};

double rel_gap(double a, double b, double floor) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = a + (b - a) * i / (count - 1);
  return v;
}

// Admissible configuration used by several suites: n = 2, alpha = 1.5,
// rho = 3, p = 3, q = 3.2, mu = 0.
constexpr double kP = 3.0;
constexpr double kQ = 3.2;

ModelParams cubic_model(int gamma_sign) {
  ModelParams m;
  m.alpha = 1.5;
  m.rho = 3.0;
  m.gamma_sign = gamma_sign;
  return m;
}

std::vector<Verdict> suite_mlf(const VerifyOptions& options) {
  Suite s("mlf");
  double heat = 0.0;
  double wave = 0.0;
  for (double x : linspace(0.0, 50.0, 501)) {
    heat = std::max(heat, rel_gap(ml_one(1.0, x), std::exp(-x), 1e-300));
    wave = std::max(wave, std::abs(ml_one(2.0, x) - std::cos(std::sqrt(x))));
  }
  s.at_most("E_1(-x) = exp(-x), relative", heat, 1e-10);
  s.at_most("E_2(-x) = cos(sqrt x), absolute", wave, 1e-10);

  MLParams series;
  series.path = MLPath::Series;
  MLParams decomposition;
  decomposition.path = MLPath::Decomposition;
  for (double alpha : {1.1, 1.5, 1.9}) {
    double worst = 0.0;
    for (double b : {1.0, alpha, alpha + 1.0, alpha + 2.0}) {
      for (double x : linspace(1.0, 12.0, 45)) {
        worst = std::max(worst, rel_gap(ml_two(alpha, b, x, decomposition), ml_two(alpha, b, x, series), 1e-3));
      }
    }
    std::ostringstream name;
    name << "series and decomposition agree, alpha = " << alpha;
    s.at_most(name.str(), worst, 1e-8, "b in {1, alpha, alpha+1, alpha+2}, x in [1, 12]");
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> alpha_dist(1.0, 2.0);
  std::uniform_real_distribution<double> log_x(-3.0, 3.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double alpha = alpha_dist(rng);
    const double x = std::pow(10.0, log_x(rng));
    if (std::abs(ml_one(alpha, x)) > 1.0 + 1e-12) ++violations;
  }
  s.at_most("|E_alpha(-x)| <= 1 violations in 10^4 samples", violations, 0);

  double table = 0.0;
  for (double alpha : {1.25, 1.5, 1.75}) {
    for (double b : {1.0, alpha, alpha + 1.0, alpha + 2.0}) {
      const MittagLefflerTable t(alpha, b, MLParams{});
      for (double x : linspace(5.0, 250.0, 400)) table = std::max(table, rel_gap(t(x), ml_two(alpha, b, x), 1e-3));
    }
  }
  s.at_most("Chebyshev tables match direct evaluation", table, 1e-11);
  return s.take();
}

std::vector<Verdict> suite_propagator() {
  Suite s("propagator");
  const double alpha = 1.5;
  const double h = 0.002;
  std::vector<double> xs;
  for (double x = -40.0; x <= 40.0 + 1e-12; x += h) xs.push_back(x);
  const auto k1 = kernel_sample_1d(alpha, 1.0, xs);
  double mass = 0.0;
  for (double v : k1) mass += h * v;
  s.at_most("kernel mass |int k(1, x) dx - 1|", std::abs(mass - 1.0), 1e-6);
  s.at_least("kernel minimum", *std::min_element(k1.begin(), k1.end()), -1e-6);

  const double t = 4.0;
  const double scale = std::pow(t, 0.5 * alpha);
  const auto probe = linspace(-6.0, 6.0, 121);
  std::vector<double> stretched(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) stretched[i] = probe[i] / scale;
  const auto kt = kernel_sample_1d(alpha, t, probe);
  const auto ks = kernel_sample_1d(alpha, 1.0, stretched);
  double collapse = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) collapse = std::max(collapse, std::abs(kt[i] - ks[i] / scale));
  s.at_most("self-similar collapse k(t, x) = t^(-alpha/2) k(1, t^(-alpha/2) x)", collapse, 1e-6);

  ModelParams heat;
  heat.alpha = 1.0;
  const BoxGrid grid(2, 128, 16.0);
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-x.squaredNorm()); });
  double gap = 0.0;
  for (double time : {0.1, 0.5, 1.0}) {
    const GridFunction u = linear_propagate(u0, time, heat);
    const double spread = 1.0 + 4.0 * time;
    const GridFunction exact = GridFunction::sample(
        grid, [&](const Frequency& x) { return std::exp(-x.squaredNorm() / spread) / spread; });
    gap = std::max(gap, (u.values - exact.values).cwiseAbs().maxCoeff());
  }
  s.at_most("alpha = 1 matches the Gaussian heat solution", gap, 1e-10);

  const ModelParams wave = cubic_model(0);
  const PropagatorContext context(wave, grid);
  const GridFunction via_context = inverse(context.propagate(forward(u0), 0.7));
  const GridFunction direct = linear_propagate(u0, 0.7, wave);
  s.at_most("tabulated and direct propagators agree", (via_context.values - direct.values).cwiseAbs().maxCoeff(), 1e-12);

  const GridFunction v = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-0.5 * x.squaredNorm()); });
  const std::vector<double> ts{1e-1, 1e-2, 1e-3, 1e-4};
  const auto pairing = smalltime_pairing_check(u0, v, ts, wave);
  s.at_most("weak initial trace |<L(t) u0 - u0, v>| at t = 1e-4", pairing.back(), 1e-3);
  bool decreasing = true;
  for (std::size_t i = 1; i < pairing.size(); ++i) decreasing = decreasing && pairing[i] < pairing[i - 1];
  s.holds("pairing decreases as t -> 0", decreasing);
  return s.take();
}

GridFunction random_field(const BoxGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  GridFunction f(grid);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = normal(rng);
  return f;
}

std::vector<Verdict> suite_norms(const VerifyOptions& options) {
  Suite s("norms");
  std::mt19937_64 rng(options.seed + 1);
  const int N = options.grid;
  const double tuples[][2] = {{1.0, 0.0}, {2.0, 0.5}, {3.0, 0.9}};
  for (int n : {1, 2}) {
    const BoxGrid grid(n, N, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const GridFunction f = random_field(grid, rng);
      for (const auto& [p, mu] : tuples) {
        const double fast = morrey_norm(f, p, mu).value;
        const double brute = morrey_norm_brute_force(f, p, mu).value;
        worst = std::max(worst, rel_gap(fast, brute, 1e-300));
      }
    }
    s.at_most("morrey_norm equals brute force, n = " + std::to_string(n) + ", N = " + std::to_string(N),
              worst, 1e-12);
  }

  double scaling = 0.0;
  for (int n : {1, 2}) {
    const BoxGrid a(n, N, 4.0);
    const BoxGrid b(n, N, 2.0);
    const GridFunction f = GridFunction::sample(a, [](const Frequency& x) { return std::cos(x.sum()) * std::exp(-x.squaredNorm()); });
    const GridFunction g(b, f.values);
    for (const auto& [p, mu] : tuples) {
      const double expected = std::pow(2.0, -(n - mu) / p) * morrey_norm(f, p, mu).value;
      scaling = std::max(scaling, rel_gap(morrey_norm(g, p, mu).value, expected, 1e-300));
    }
  }
  s.at_most("scaling law under dilation by 2", scaling, 1e-2);

  const BoxGrid grid(2, N, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction f = random_field(grid, rng);
    const GridFunction g = random_field(grid, rng);
    const double p1 = 2.0 + 4.0 * unit(rng);
    const double p2 = 2.0 + 4.0 * unit(rng);
    const double mu1 = 1.9 * unit(rng);
    const double mu2 = 1.9 * unit(rng);
    if (!check_holder(f, g, p1, mu1, p2, mu2).pass) ++violations;
  }
  s.at_most("Holder inequality violations in 100 random pairs", violations, 0);

  const LPPartition partition(BoxGrid(2, 64, 8.0));
  s.at_most("partition of unity residue", partition.partition_residue(), 1e-10);
  s.holds("default block range covers the lattice", partition.covers_lattice());

  const GridFunction f = random_field(BoxGrid(1, 64, 4.0), rng);
  GridFunction mean_free = f;
  mean_free.values.array() -= f.values.mean();
  const double l1 = besov_morrey_norm(mean_free, -0.5, 2.0, 0.3, 1.0).value;
  const double sup = besov_morrey_norm(mean_free, -0.5, 2.0, 0.3, std::numeric_limits<double>::infinity()).value;
  s.at_least("l^1 block sum dominates the sup", l1 - sup, 0.0);
  return s.take();
}

std::vector<Verdict> suite_contraction() {
  Suite s("contraction");
  const ModelParams model = cubic_model(1);
  const BoxGrid grid(2, 32, 8.0);
  const TimeGrid tgrid(1.0, 32);
  auto gaussian = [&](double amplitude) {
    return GridFunction::sample(grid, [=](const Frequency& x) { return amplitude * std::exp(-x.squaredNorm()); });
  };
  const GridFunction u0 = gaussian(0.1);
  const PicardResult small = picard_solve(u0, model, tgrid);
  const PicardReport& r = small.report;
  double worst = 0.0;
  for (double ratio : r.ratios) worst = std::max(worst, ratio);
  s.holds("small data converges", r.converged, r.message);
  s.at_most("max successive-difference ratio", worst, 0.5);
  s.at_most("2^rho K eps^(rho-1)", std::pow(2.0, model.rho) * r.K_meas * std::pow(r.epsilon, model.rho - 1.0), 0.5);

  bool flagged = false;
  try {
    picard_solve(gaussian(10.0), model, tgrid);
  } catch (const NonConvergenceError&) {
    flagged = true;
  }
  s.holds("data scaled x100 reports nonconvergence", flagged);

  const DerivedExponents e = DerivedExponents::compute(2, model.alpha, model.rho, kP, kQ, 0.0);
  XNormSpec x;
  x.p = kP;
  x.q = kQ;
  x.eta = e.eta;
  x.sigma = e.sigma;
  const GridFunction perturbed = GridFunction::sample(grid, [](const Frequency& p) {
    return 0.1 * std::exp(-p.squaredNorm()) + 0.01 * std::exp(-(p.array() - 1.0).matrix().squaredNorm());
  });
  const DependenceReport dep = continuous_dependence_check(u0, perturbed, model, TimeGrid(1.0, 16), x);
  std::ostringstream detail;
  detail << "ratio " << dep.ratio << ", bound " << dep.bound;
  s.holds("continuous dependence ratio within the contraction bound", dep.pass, detail.str());
  return s.take();
}

std::vector<Verdict> suite_symmetry(const RunConfig& config) {
  Suite s("symmetry");
  ModelParams model = config.model;
  if (model.gamma_sign == 0) model.gamma_sign = 1;
  const BoxGrid grid = config.grid();
  const TimeGrid tgrid = config.time_grid();
  const double k0 = grid.frequency_step();
  const double amplitude = 0.1;
  const GridFunction even = GridFunction::sample(grid, [&](const Frequency& x) {
    return amplitude * std::exp(-x.squaredNorm()) * (1.0 + 0.5 * std::cos(2.0 * k0 * x[0]));
  });
  const GridFunction odd = GridFunction::sample(grid, [&](const Frequency& x) {
    return amplitude * std::sin(k0 * x[0]) * std::exp(-0.25 * x.squaredNorm());
  });
  const SignedPermutation reflect = SignedPermutation::reflection(grid.dim(), 0);
  const Trajectory ue = march_solve(even, model, tgrid, config.tolerances.corrector_iters);
  s.at_most("even data stays even under x_1 -> -x_1", symmetry_check(ue, reflect, Parity::Even), 1e-8);
  if (model.form == NonlinearityForm::Signed) {
    const Trajectory uo = march_solve(odd, model, tgrid, config.tolerances.corrector_iters);
    s.at_most("odd data stays odd under x_1 -> -x_1", symmetry_check(uo, reflect, Parity::Odd), 1e-8);
  }
  if (grid.dim() >= 2 && grid.size(0) == grid.size(1)) {
    const GridFunction radial = GridFunction::sample(grid, [&](const Frequency& x) {
      return amplitude * std::exp(-x.squaredNorm());
    });
    const Trajectory ur = march_solve(radial, model, tgrid, config.tolerances.corrector_iters);
    s.at_most("radial data stays symmetric under x_1 <-> x_2",
              symmetry_check(ur, SignedPermutation::swap(grid.dim(), 0, 1), Parity::Even), 1e-8);
  }
  return s.take();
}

std::vector<Verdict> suite_selfsim() {
  Suite s("selfsim");
  SelfSimilaritySetup setup;
  setup.n = 2;
  setup.points = 64;
  setup.half_length = 8.0;
  setup.amplitude = 0.05;
  setup.mollification = 0.25;
  setup.window_start = 0.5;
  const TimeGrid tgrid(24.0, 64);
  for (int gamma : {0, 1}) {
    const ModelParams model = cubic_model(gamma);
    const std::string kind = gamma == 0 ? "linear" : "nonlinear";
    const double coarse = self_similarity_check(model, tgrid, 2, setup).defect;
    SelfSimilaritySetup finer = setup;
    finer.mollification = 0.5 * setup.mollification;
    const double fine = self_similarity_check(model, tgrid, 2, finer).defect;
    s.at_most(kind + " two-box defect", coarse, 0.05);
    s.at_most(kind + " |defect ratio - 1/2| when the mollification halves", std::abs(fine / coarse - 0.5), 0.1);
  }
  return s.take();
}

std::vector<Verdict> suite_decay() {
  Suite s("decay");
  const ModelParams model = cubic_model(0);
  const BoxGrid grid(2, 512, 32.0);
  const PropagatorContext context(model, grid);
  const SpectralField u0_hat = forward(homogeneous_data(grid, model.rho, 1.0, 0.125));
  Trajectory traj;
  const int count = 25;
  for (int k = 0; k < count; ++k) {
    const double t = 0.5 * std::pow(80.0, static_cast<double>(k) / (count - 1));
    traj.push_back(t, inverse(context.propagate(u0_hat, t)));
  }
  const DerivedExponents e = DerivedExponents::compute(2, model.alpha, model.rho, kP, kQ, 0.0);
  const DecayFit fit = decay_fit(traj, kQ, 0.0, e);
  std::ostringstream detail;
  detail << "slope " << fit.slope << ", expected " << fit.expected << ", " << fit.decades << " decades";
  s.at_most("log-log slope relative to -eta", fit.relative_error, 0.1, detail.str());
  return s.take();
}

std::vector<Verdict> suite_asymptotic() {
  Suite s("asymptotic");
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
  const AsymptoticReport nl = asymptotic_equivalence_check(u0, v0, cubic_model(1), tgrid, e, options);
  s.at_most("(A1) Besov-Morrey curve at the horizon", nl.a1_besov.back(), options.tol);
  s.at_most("(A1) weighted Morrey curve at the horizon", nl.a1_morrey.back(), options.tol);
  s.at_most("(A2) linear curve at the horizon",
            std::max(nl.a2_besov.back(), nl.a2_morrey.back()), options.tol);
  const AsymptoticReport lin = asymptotic_equivalence_check(u0, v0, cubic_model(0), tgrid, e, options);
  s.at_most("gamma = 0: (A1) and (A2) coincide", lin.max_gap, 1e-12);
  return s.take();
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"mlf",      "propagator", "norms", "contraction",
                                              "symmetry", "selfsim",    "decay", "asymptotic"};
  return names;
}

std::vector<Verdict> run_suite(const std::string& suite, const RunConfig& config,
                               const VerifyOptions& options) {
  if (suite == "mlf") return suite_mlf(options);
  if (suite == "propagator") return suite_propagator();
  if (suite == "norms") return suite_norms(options);
  if (suite == "contraction") return suite_contraction();
  if (suite == "symmetry") return suite_symmetry(config);
  if (suite == "selfsim") return suite_selfsim();
  if (suite == "decay") return suite_decay();
  if (suite == "asymptotic") return suite_asymptotic();
  throw PreconditionError("unknown verification suite '" + suite + "'");
}

std::vector<Verdict> run_verification(const std::vector<std::string>& suites, const RunConfig& config,
                                      const VerifyOptions& options) {
  std::vector<std::string> expanded;
  for (const auto& name : suites) {
    if (name == "all") {
      expanded.insert(expanded.end(), verify_suite_names().begin(), verify_suite_names().end());
    } else if (std::find(verify_suite_names().begin(), verify_suite_names().end(), name) !=
               verify_suite_names().end()) {
      expanded.push_back(name);
    } else {
      throw PreconditionError("unknown verification suite '" + name + "'");
    }
  }

  auto guarded = [&](const std::string& name) -> std::vector<Verdict> {
    try {
      return run_suite(name, config, options);
    } catch (const std::exception& e) {
      return {Verdict{name, "exception", 0.0, "==", 1.0, false, e.what()}};
    }
  };

  std::vector<std::vector<Verdict>> results(expanded.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  for (std::size_t start = 0; start < expanded.size(); start += jobs) {
    const std::size_t stop = std::min(expanded.size(), start + jobs);
    std::vector<std::future<std::vector<Verdict>>> running;
    for (std::size_t i = start; i < stop; ++i) {
      running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, guarded,
                                   expanded[i]));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = running[i - start].get();
  }
  std::vector<Verdict> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  return all;
}

}  // namespace fhw
