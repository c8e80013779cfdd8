#include "fhw/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "fhw/io.hpp"
#include "fhw/scaling_analysis.hpp"

namespace fhw {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw PreconditionError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw PreconditionError("config: unknown key '" + k + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::filesystem::path RunConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  if (const char* env = std::getenv("FHW_OUT_DIR"); env && *env) return env;
  return "fhw_out";
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"alpha", c.model.alpha},           {"rho", c.model.rho},
                {"gamma_sign", c.model.gamma_sign}, {"nu", c.model.nu},
                {"form", std::string(to_string(c.model.form))}, {"dealias", c.model.dealias}};
  j["space"] = {{"n", c.n}, {"sizes", c.sizes}, {"L", c.L}};
  j["time"] = {{"T", c.T}, {"Nt", c.Nt}};
  j["params"] = {{"p", c.p}, {"q", c.q}, {"mu", c.mu}};
  const InitialData& d = c.initial;
  j["initial"] = {{"kind", d.kind},     {"amplitude", d.amplitude}, {"width", d.width},
                  {"radius", d.radius}, {"eps", d.eps},             {"center", d.center},
                  {"mode", d.mode},     {"path", d.path}};
  j["tolerances"] = {{"picard_tol", c.tolerances.picard_tol},
                     {"max_iter", c.tolerances.max_iter},
                     {"corrector_iters", c.tolerances.corrector_iters},
                     {"blowup_threshold", c.tolerances.blowup_threshold}};
  j["output"] = {{"dir", c.output_dir}, {"stride", c.stride}};
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  reject_unknown(j, {"model", "space", "time", "params", "initial", "tolerances", "output", "seed"}, "config");
  if (j.contains("model")) {
    const json& m = j["model"];
    reject_unknown(m, {"alpha", "rho", "gamma_sign", "nu", "form", "dealias"}, "model");
    read(m, "alpha", c.model.alpha);
    read(m, "rho", c.model.rho);
    read(m, "gamma_sign", c.model.gamma_sign);
    read(m, "nu", c.model.nu);
    read(m, "dealias", c.model.dealias);
    if (m.contains("form")) {
      const auto form = m["form"].get<std::string>();
      if (form == "signed") {
        c.model.form = NonlinearityForm::Signed;
      } else if (form == "unsigned") {
        c.model.form = NonlinearityForm::Unsigned;
      } else {
        throw PreconditionError("config: model.form must be 'signed' or 'unsigned'");
      }
    }
  }
  if (j.contains("space")) {
    const json& s = j["space"];
    reject_unknown(s, {"n", "N", "sizes", "L"}, "space");
    read(s, "n", c.n);
    read(s, "L", c.L);
    if (s.contains("sizes")) {
      c.sizes = s["sizes"].get<std::vector<int>>();
    } else if (s.contains("N")) {
      c.sizes.assign(c.n, s["N"].get<int>());
    } else if (static_cast<int>(c.sizes.size()) != c.n) {
      c.sizes.assign(c.n, c.sizes.empty() ? 64 : c.sizes.front());
    }
    if (static_cast<int>(c.sizes.size()) != c.n) {
      throw PreconditionError("config: space.sizes must have n entries");
    }
  }
  if (j.contains("time")) {
    reject_unknown(j["time"], {"T", "Nt"}, "time");
    read(j["time"], "T", c.T);
    read(j["time"], "Nt", c.Nt);
  }
  if (j.contains("params")) {
    reject_unknown(j["params"], {"p", "q", "mu"}, "params");
    read(j["params"], "p", c.p);
    read(j["params"], "q", c.q);
    read(j["params"], "mu", c.mu);
  }
  if (j.contains("initial")) {
    const json& d = j["initial"];
    reject_unknown(d, {"kind", "amplitude", "width", "radius", "eps", "center", "mode", "path"}, "initial");
    read(d, "kind", c.initial.kind);
    read(d, "amplitude", c.initial.amplitude);
    read(d, "width", c.initial.width);
    read(d, "radius", c.initial.radius);
    read(d, "eps", c.initial.eps);
    read(d, "center", c.initial.center);
    read(d, "mode", c.initial.mode);
    read(d, "path", c.initial.path);
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    reject_unknown(t, {"picard_tol", "max_iter", "corrector_iters", "blowup_threshold"}, "tolerances");
    read(t, "picard_tol", c.tolerances.picard_tol);
    read(t, "max_iter", c.tolerances.max_iter);
    read(t, "corrector_iters", c.tolerances.corrector_iters);
    read(t, "blowup_threshold", c.tolerances.blowup_threshold);
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], {"dir", "stride"}, "output");
    read(j["output"], "dir", c.output_dir);
    read(j["output"], "stride", c.stride);
  }
  read(j, "seed", c.seed);
  if (c.Nt < 8) throw PreconditionError("config: time.Nt must be at least 8");
  if (!(c.T > 0.0)) throw PreconditionError("config: time.T must be positive");
  if (c.stride < 1) throw PreconditionError("config: output.stride must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("config: cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw PreconditionError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string RunConfig::hash() const {
  // Where the results go is not part of the run's identity.
  nlohmann::json j = to_json(*this);
  j["output"].erase("dir");
  return hash_hex(fnv1a64(j.dump()));
}

GridFunction make_initial_data(const RunConfig& c) {
  const BoxGrid grid = c.grid();
  const InitialData& d = c.initial;
  const int n = grid.dim();
  Frequency center = Frequency::Zero(n);
  if (!d.center.empty()) {
    if (static_cast<int>(d.center.size()) != n) throw PreconditionError("initial.center must have n entries");
    for (int a = 0; a < n; ++a) center[a] = d.center[a];
  }
  Frequency mode = Frequency::Zero(n);
  if (d.mode.empty()) {
    mode[0] = 1.0;
  } else {
    if (static_cast<int>(d.mode.size()) != n) throw PreconditionError("initial.mode must have n entries");
    for (int a = 0; a < n; ++a) mode[a] = d.mode[a];
  }
  const double k0 = grid.frequency_step();

  if (d.kind == "gaussian") {
    return GridFunction::sample(grid, [&](const Frequency& x) {
      return d.amplitude * std::exp(-(x - center).squaredNorm() / (d.width * d.width));
    });
  }
  if (d.kind == "sine") {
    return GridFunction::sample(grid, [&](const Frequency& x) { return d.amplitude * std::sin(k0 * mode.dot(x)); });
  }
  if (d.kind == "cosine") {
    return GridFunction::sample(grid, [&](const Frequency& x) { return d.amplitude * std::cos(k0 * mode.dot(x)); });
  }
  if (d.kind == "homogeneous") return homogeneous_data(grid, c.model.rho, d.amplitude, d.eps);
  if (d.kind == "indicator") {
    return GridFunction::sample(grid, [&](const Frequency& x) {
      return (x - center).norm() <= d.radius ? d.amplitude : 0.0;
    });
  }
  if (d.kind == "file") {
    GridFunction f = read_fhwg(d.path);
    if (f.grid != grid) {
      throw PreconditionError("initial data file " + d.path + " has grid " + f.grid.describe() +
                              ", config expects " + grid.describe());
    }
    return f;
  }
  throw PreconditionError("initial.kind '" + d.kind + "' is not a known generator");
}

}  // namespace fhw
