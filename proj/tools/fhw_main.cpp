// fhw: command-line front end for the time-fractional heat-wave laboratory.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage, 3 blow-up, 4 nonconvergence.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fhw/config.hpp"
#include "fhw/io.hpp"
#include "fhw/mild_solver.hpp"
#include "fhw/morrey_norms.hpp"
#include "fhw/scaling_analysis.hpp"
#include "fhw/special_functions.hpp"
#include "fhw/verify.hpp"

namespace fs = std::filesystem;
using namespace fhw;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kBlowUp = 3, kNonConvergence = 4 };

// Command-line overrides of RunConfig fields; unset options leave the
// config untouched.
struct Overrides {
  std::string config_path;
  std::optional<double> alpha, rho, nu, L, T, p, q, mu, amplitude, width, eps, radius;
  std::optional<int> gamma, n, N, Nt, stride;
  std::optional<std::string> form, data, data_file, out;
  std::optional<unsigned long long> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--alpha", alpha, "time order alpha in [1, 2)");
    app->add_option("--rho", rho, "nonlinearity power rho > 1");
    app->add_option("--gamma", gamma, "nonlinearity sign: -1, 0 or 1");
    app->add_option("--nu", nu, "diffusion coefficient");
    app->add_option("--form", form, "signed or unsigned nonlinearity");
    app->add_option("--n", n, "space dimension (1..3)");
    app->add_option("--N", N, "points per axis (power of two)");
    app->add_option("--L", L, "box half-length");
    app->add_option("--T", T, "time horizon");
    app->add_option("--Nt", Nt, "number of time steps");
    app->add_option("--p", p, "data exponent p");
    app->add_option("--q", q, "solution exponent q");
    app->add_option("--mu", mu, "Morrey index mu");
    app->add_option("--data", data, "gaussian, sine, cosine, homogeneous, indicator or file");
    app->add_option("--data-file", data_file, "FHWG file for --data file");
    app->add_option("--amplitude", amplitude, "initial-data amplitude");
    app->add_option("--width", width, "Gaussian width");
    app->add_option("--eps", eps, "mollification of homogeneous data");
    app->add_option("--radius", radius, "indicator radius");
    app->add_option("--out", out, "output directory (default $FHW_OUT_DIR or ./fhw_out)");
    app->add_option("--stride", stride, "snapshot stride in time nodes");
    app->add_option("--seed", seed, "seed recorded in the config");
  }

  RunConfig apply() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    nlohmann::json j = to_json(c);
    auto set = [&](const char* section, const char* key, const auto& value) {
      if (value) j[section][key] = *value;
    };
    set("model", "alpha", alpha);
    set("model", "rho", rho);
    set("model", "gamma_sign", gamma);
    set("model", "nu", nu);
    set("model", "form", form);
    set("time", "T", T);
    set("time", "Nt", Nt);
    set("params", "p", p);
    set("params", "q", q);
    set("params", "mu", mu);
    set("initial", "kind", data);
    set("initial", "path", data_file);
    set("initial", "amplitude", amplitude);
    set("initial", "width", width);
    set("initial", "eps", eps);
    set("initial", "radius", radius);
    set("output", "dir", out);
    set("output", "stride", stride);
    set("space", "L", L);
    if (seed) j["seed"] = *seed;
    if (n || N) {
      const int dim = n.value_or(c.n);
      const int points = N.value_or(c.sizes.empty() ? 64 : c.sizes.front());
      j["space"]["n"] = dim;
      j["space"]["sizes"] = std::vector<int>(dim, points);
    }
    if (data_file && !data) j["initial"]["kind"] = "file";
    return config_from_json(j);
  }
};

std::string render_verdict(const ParamVerdict& v) {
  const DerivedExponents& e = v.exponents;
  std::ostringstream os;
  os << std::setprecision(10);
  os << "admissible: " << (v.admissible ? "yes" : "no") << "\n";
  os << "eta = " << e.eta << "\nsigma = " << e.sigma << "\ngamma1 = " << e.gamma1
     << "\ngamma2 = " << e.gamma2 << "\ns_tilde = " << e.s_tilde << "\n";
  for (const Condition& c : v.conditions) {
    os << (c.holds ? "  [ok]   " : "  [FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  return os.str();
}

MLPath parse_path(const std::string& s) {
  if (s == "auto") return MLPath::Auto;
  if (s == "series") return MLPath::Series;
  if (s == "decomposition") return MLPath::Decomposition;
  throw CLI::ValidationError("--path", "expected auto, series or decomposition");
}

int cmd_ml_eval(const std::vector<double>& alphas, const std::vector<double>& xs,
                std::optional<double> b, bool two_param, const std::string& path_name) {
  MLParams params;
  params.path = parse_path(path_name);
  nlohmann::json request{{"alpha", alphas}, {"x", xs}, {"two_param", two_param},
                         {"b", b.value_or(1.0)}, {"path", path_name}};
  CsvWriter csv(std::cout, hash_hex(fnv1a64(request.dump())), {"alpha", "b", "x", "value", "path_used"});
  for (double alpha : alphas) {
    const double bb = two_param ? b.value_or(alpha) : 1.0;
    for (double x : xs) {
      const MLValue v = ml_two_eval(alpha, bb, x, params);
      csv.cell(alpha).cell(bb).cell(x).cell(v.value).cell(to_string(v.path));
      csv.end_row();
    }
  }
  return kOk;
}

void write_config_echo(const RunConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream os(dir / "config.json");
  os << to_json(c).dump(2) << "\n";
}

void write_picard_report(const PicardReport& r, const std::string& hash, const fs::path& file) {
  std::ofstream os(file);
  CsvWriter csv(os, hash, {"iterate", "norm", "difference", "ratio"});
  for (std::size_t k = 0; k < r.norms.size(); ++k) {
    csv.cell(static_cast<long long>(k + 1)).cell(r.norms[k]).cell(r.differences[k]);
    const double ratio = k >= 1 && k - 1 < r.ratios.size() ? r.ratios[k - 1] : std::numeric_limits<double>::quiet_NaN();
    csv.cell(ratio);
    csv.end_row();
  }
}

void write_trajectory(const Trajectory& traj, const RunConfig& c, double eta, const fs::path& dir) {
  const std::string hash = c.hash();
  std::ofstream manifest(dir / "manifest.csv");
  CsvWriter csv(manifest, hash, {"node", "t", "l2", "linf", "morrey_q", "t_eta_morrey_q", "file"});
  const int last = static_cast<int>(traj.size()) - 1;
  for (int k = 0; k <= last; ++k) {
    const GridFunction& u = traj.states[k];
    const double t = traj.times[k];
    const double m = morrey_norm(u, c.q, c.mu).value;
    std::string file;
    if (k % c.stride == 0 || k == last) {
      std::ostringstream name;
      name << "u_" << std::setw(5) << std::setfill('0') << k << ".fhwg";
      file = name.str();
      write_fhwg(dir / file, u);
    }
    csv.cell(k).cell(t).cell(lp_norm(u, 2.0)).cell(lp_norm(u, std::numeric_limits<double>::infinity()));
    csv.cell(m).cell(t > 0.0 ? std::pow(t, eta) * m : 0.0).cell(file);
    csv.end_row();
  }
}

int cmd_params(const Overrides& o) {
  const RunConfig c = o.apply();
  const ParamVerdict v = validate_params(c.n, c.model.alpha, c.model.rho, c.p, c.q, c.mu);
  std::cout << "n = " << c.n << ", alpha = " << c.model.alpha << ", rho = " << c.model.rho
            << ", p = " << c.p << ", q = " << c.q << ", mu = " << c.mu << "\n";
  std::cout << render_verdict(v);
  return kOk;
}

int cmd_solve(const Overrides& o, bool picard, bool force) {
  const RunConfig c = o.apply();
  c.model.validate();
  const ParamVerdict v = validate_params(c.n, c.model.alpha, c.model.rho, c.p, c.q, c.mu);
  if (!v.admissible && !force) {
    std::cerr << "configuration is not admissible (use --force to run anyway):\n" << render_verdict(v);
    return kUsage;
  }
  const fs::path dir = c.resolved_output_dir();
  write_config_echo(c, dir);
  const GridFunction u0 = make_initial_data(c);
  const TimeGrid tgrid = c.time_grid();
  const std::string hash = c.hash();
  try {
    Trajectory traj;
    if (picard) {
      PicardOptions options;
      options.tol = c.tolerances.picard_tol;
      options.max_iter = c.tolerances.max_iter;
      PicardResult r = picard_solve(u0, c.model, tgrid, options);
      write_picard_report(r.report, hash, dir / "picard_report.csv");
      traj = std::move(r.trajectory);
    } else {
      traj = march_solve(u0, c.model, tgrid, c.tolerances.corrector_iters, c.tolerances.blowup_threshold);
    }
    write_trajectory(traj, c, v.exponents.eta, dir);
    std::cout << "wrote " << traj.size() << " nodes to " << dir.string() << " (config " << hash << ")\n";
    return kOk;
  } catch (const BlowUpError& e) {
    write_trajectory(e.partial(), c, v.exponents.eta, dir);
    std::cerr << e.what() << "; last valid node " << e.last_valid_index() << "\n";
    return kBlowUp;
  } catch (const NonConvergenceError& e) {
    write_picard_report(e.report(), hash, dir / "picard_report.csv");
    std::cerr << e.what() << "\n";
    const PicardReport& r = e.report();
    for (std::size_t k = 0; k < r.differences.size(); ++k) {
      std::cerr << "  iterate " << k + 1 << ": norm " << r.norms[k] << ", difference " << r.differences[k] << "\n";
    }
    return kNonConvergence;
  }
}

int cmd_norms(const Overrides& o, const std::string& file, const std::string& kind, double s, double r,
              const std::string& csv_path) {
  const RunConfig c = o.apply();
  const GridFunction f = file.empty() ? make_initial_data(c) : read_fhwg(file);
  std::string hash = c.hash();
  if (!file.empty()) {
    std::ifstream is(file, std::ios::binary);
    std::ostringstream bytes;
    bytes << is.rdbuf();
    hash = hash_hex(fnv1a64(bytes.str()));
  }
  std::ofstream out_file;
  if (!csv_path.empty()) out_file.open(csv_path);
  std::ostream& os = csv_path.empty() ? std::cout : out_file;
  CsvWriter csv(os, hash, {"kind", "s", "p", "q", "mu", "r", "value", "j_or_radius_witness"});
  auto row = [&](const NormReport& n, double witness) {
    csv.cell(n.kind).cell(n.s).cell(n.p).cell(n.q).cell(n.mu).cell(n.r).cell(n.value).cell(witness);
    csv.end_row();
  };
  const bool all = kind == "all";
  if (all || kind == "morrey") {
    const NormReport n = morrey_norm(f, c.q, c.mu);
    row(n, n.best_radius);
  }
  if (all || kind == "sobolev") {
    const NormReport n = sobolev_morrey_norm(f, s, c.p, c.mu);
    row(n, n.best_radius);
  }
  if (all || kind == "besov") {
    GridFunction g = f;
    g.values.array() -= f.values.mean();
    const NormReport n = besov_morrey_norm(g, s, c.p, c.mu, r);
    row(n, n.best_j);
    for (const auto& w : n.warnings) std::cerr << "warning: " << w << "\n";
  }
  if (!all && kind != "morrey" && kind != "sobolev" && kind != "besov") {
    throw CLI::ValidationError("--kind", "expected morrey, sobolev, besov or all");
  }
  return kOk;
}

int cmd_verify(const Overrides& o, const std::vector<std::string>& suites, const VerifyOptions& options,
               const std::string& csv_path) {
  const RunConfig c = o.apply();
  const std::vector<Verdict> verdicts = run_verification(suites, c, options);
  const fs::path file = csv_path.empty() ? c.resolved_output_dir() / "verify.csv" : fs::path(csv_path);
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  CsvWriter csv(os, c.hash(), {"suite", "name", "value", "relation", "threshold", "pass", "detail"});
  int failures = 0;
  for (const Verdict& v : verdicts) {
    csv.cell(v.suite).cell(v.name).cell(v.value).cell(v.relation).cell(v.threshold).cell(v.pass ? "true" : "false").cell(v.detail);
    csv.end_row();
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.suite << ": " << v.name << " = " << v.value << " ("
              << v.relation << " " << v.threshold << ")" << (v.detail.empty() ? "" : "  " + v.detail) << "\n";
    if (!v.pass) ++failures;
  }
  std::cout << "verdicts written to " << file.string() << "\n";
  if (failures > 0) {
    std::cerr << failures << " check(s) failed:\n";
    for (const Verdict& v : verdicts) {
      if (!v.pass) std::cerr << "  " << v.suite << ": " << v.name << "\n";
    }
    return kVerifyFail;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the semilinear time-fractional heat-wave equation"};
  app.require_subcommand(1);

  auto* ml = app.add_subcommand("ml-eval", "evaluate Mittag-Leffler functions as CSV");
  std::vector<double> alphas;
  std::vector<double> xs;
  std::optional<double> b;
  bool two_param = false;
  std::string path = "auto";
  ml->add_option("--alpha", alphas, "one or more alpha values")->required();
  ml->add_option("--x", xs, "one or more arguments x >= 0 (evaluates E(-x))")->required();
  ml->add_flag("--two-param", two_param, "evaluate E_{alpha,b}");
  ml->add_option("--b", b, "second parameter (default alpha)");
  ml->add_option("--path", path, "auto, series or decomposition");

  Overrides params_o, solve_o, norms_o, verify_o;
  auto* params = app.add_subcommand("params", "admissibility report and derived exponents");
  params_o.attach(params);

  auto* solve = app.add_subcommand("solve", "march or Picard solve with FHWG snapshots and a CSV manifest");
  solve_o.attach(solve);
  bool picard = false;
  bool force = false;
  solve->add_flag("--picard", picard, "full-trajectory Picard iteration instead of marching");
  solve->add_flag("--force", force, "run configurations outside the admissible window");

  auto* norms = app.add_subcommand("norms", "Morrey, Sobolev-Morrey and Besov-Morrey norms of a field");
  norms_o.attach(norms);
  std::string field_file;
  std::string kind = "all";
  std::string norms_csv;
  double s = 0.0;
  double r = std::numeric_limits<double>::infinity();
  norms->add_option("--file", field_file, "FHWG field (default: the configured initial data)");
  norms->add_option("--kind", kind, "morrey, sobolev, besov or all");
  norms->add_option("--s", s, "regularity index");
  norms->add_option("--r", r, "block summability index (default inf)");
  norms->add_option("--csv", norms_csv, "write the report here instead of standard output");

  auto* verify = app.add_subcommand("verify", "run verification suites and write a verdict CSV");
  verify_o.attach(verify);
  std::vector<std::string> suites{"all"};
  VerifyOptions vopt;
  std::string verify_csv;
  verify->add_option("--suite", suites, "mlf, propagator, norms, contraction, symmetry, selfsim, decay, asymptotic, all")->delimiter(',');
  verify->add_option("--grid", vopt.grid, "points per axis of the exhaustive norm grids")->check(CLI::Range(8, 32));
  verify->add_option("--jobs", vopt.jobs, "suites run in parallel")->check(CLI::PositiveNumber);
  verify->add_option("--csv", verify_csv, "verdict CSV path (default <out>/verify.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ml) return cmd_ml_eval(alphas, xs, b, two_param, path);
    if (*params) return cmd_params(params_o);
    if (*solve) return cmd_solve(solve_o, picard, force);
    if (*norms) return cmd_norms(norms_o, field_file, kind, s, r, norms_csv);
    if (*verify) return cmd_verify(verify_o, suites, vopt, verify_csv);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
