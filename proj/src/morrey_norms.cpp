#include "fhw/morrey_norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>

namespace fhw {

namespace {

constexpr double kRadiusSlack = 1e-12;

void check_exponents(const BoxGrid& grid, double p, double mu, const char* who) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw DomainError(std::string(who) + ": p must be finite and >= 1");
  }
  if (!(mu >= 0.0) || !(mu < grid.dim())) {
    throw DomainError(std::string(who) + ": mu must lie in [0, n), got " + std::to_string(mu));
  }
}

double min_spacing(const BoxGrid& grid) {
  double h = grid.spacing(0);
  for (int a = 1; a < grid.dim(); ++a) h = std::min(h, grid.spacing(a));
  return h;
}

// Squared minimum-image length of the offset stored at a flat index.
double offset_distance_sq(const BoxGrid& grid, Eigen::Index flat) {
  const auto idx = grid.unflatten(flat);
  double d2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const int k = std::min(idx[a], grid.size(a) - idx[a]);
    const double d = k * grid.spacing(a);
    d2 += d * d;
  }
  return d2;
}

Eigen::Index shifted(const BoxGrid& grid, const std::array<int, 3>& center,
                     const std::array<int, 3>& offset) {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) idx[a] = (center[a] + offset[a]) % grid.size(a);
  return grid.flatten(idx);
}

double ball_value(double content, double radius, double p, double mu, double cell) {
  return std::pow(radius, -mu / p) * std::pow(cell * std::max(content, 0.0), 1.0 / p);
}

Eigen::VectorXd abs_pow(const GridFunction& f, double p) {
  return f.values.cwiseAbs().array().pow(p).matrix();
}

// Attained radii >= 2h, ascending, with the sorted offset order and the end
// of each radius group.
struct RadiusGroups {
  std::vector<Eigen::Index> order;
  std::vector<double> radii;
  std::vector<std::size_t> group_end;
};

RadiusGroups radius_groups(const BoxGrid& grid) {
  const Eigen::Index total = grid.total();
  std::vector<double> d2(total);
  for (Eigen::Index i = 0; i < total; ++i) d2[i] = offset_distance_sq(grid, i);
  RadiusGroups g;
  g.order.resize(total);
  std::iota(g.order.begin(), g.order.end(), Eigen::Index{0});
  std::stable_sort(g.order.begin(), g.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return d2[a] < d2[b]; });
  const double r_min = 2.0 * min_spacing(grid) * (1.0 - kRadiusSlack);
  for (std::size_t i = 0; i < g.order.size(); ++i) {
    const double here = d2[g.order[i]];
    const bool last_of_group =
        i + 1 == g.order.size() || d2[g.order[i + 1]] > here * (1.0 + kRadiusSlack);
    if (!last_of_group) continue;
    const double r = std::sqrt(here);
    if (r >= r_min) {
      g.radii.push_back(r);
      g.group_end.push_back(i + 1);
    }
  }
  return g;
}

std::vector<double> dyadic_radii(const BoxGrid& grid) {
  const double h = min_spacing(grid);
  const double limit = ball_radius_limit(grid);
  std::vector<double> radii;
  for (double r = 2.0 * h; r < limit * (1.0 - kRadiusSlack); r *= 2.0) radii.push_back(r);
  radii.push_back(limit);
  return radii;
}

// Unnormalized DFT of the closed-ball indicator, cached per grid and radius.
std::shared_ptr<const Eigen::VectorXcd> ball_spectrum(const BoxGrid& grid, double radius) {
  using Key = std::tuple<std::vector<int>, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const Eigen::VectorXcd>> cache;
  const Key key{grid.sizes(), grid.half_length(), radius};
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  Eigen::VectorXcd ind = Eigen::VectorXcd::Zero(grid.total());
  const double r2 = radius * radius * (1.0 + kRadiusSlack);
  for (Eigen::Index i = 0; i < grid.total(); ++i) {
    if (offset_distance_sq(grid, i) <= r2) ind[i] = 1.0;
  }
  detail::fft_all_axes<double>(grid, ind, false);
  auto value = std::make_shared<const Eigen::VectorXcd>(std::move(ind));
  std::lock_guard lock(mutex);
  if (cache.size() > 256) cache.clear();
  cache.emplace(key, value);
  return value;
}

void finish_report(NormReport& report) {
  report.value = 0.0;
  for (const BallWitness& w : report.witnesses) {
    if (w.value > report.value) {
      report.value = w.value;
      report.best_radius = w.radius;
      report.best_center = w.center;
    }
  }
  report.radius_count = static_cast<int>(report.witnesses.size());
}

NormReport morrey_exhaustive(const GridFunction& f, double p, double mu) {
  const BoxGrid& grid = f.grid;
  const RadiusGroups groups = radius_groups(grid);
  const Eigen::VectorXd g = abs_pow(f, p);
  const double cell = grid.cell_volume();
  std::vector<std::array<int, 3>> offsets(groups.order.size());
  for (std::size_t i = 0; i < groups.order.size(); ++i) offsets[i] = grid.unflatten(groups.order[i]);

  NormReport report;
  report.exhaustive = true;
  report.center_stride = 1;
  report.witnesses.resize(groups.radii.size());
  for (std::size_t r = 0; r < groups.radii.size(); ++r) report.witnesses[r].radius = groups.radii[r];

  for (Eigen::Index c = 0; c < grid.total(); ++c) {
    const auto center = grid.unflatten(c);
    double content = 0.0;
    std::size_t next = 0;
    for (std::size_t r = 0; r < groups.radii.size(); ++r) {
      for (; next < groups.group_end[r]; ++next) content += g[shifted(grid, center, offsets[next])];
      const double v = ball_value(content, groups.radii[r], p, mu, cell);
      if (v > report.witnesses[r].value) {
        report.witnesses[r].value = v;
        report.witnesses[r].center = c;
      }
    }
  }
  return report;
}

NormReport morrey_dyadic(const GridFunction& f, double p, double mu, int stride) {
  const BoxGrid& grid = f.grid;
  const Eigen::VectorXd g = abs_pow(f, p);
  const double cell = grid.cell_volume();
  const double limit = ball_radius_limit(grid);
  NormReport report;
  report.exhaustive = false;
  report.center_stride = stride;

  std::vector<Eigen::Index> centers;
  for (Eigen::Index c = 0; c < grid.total(); ++c) {
    const auto idx = grid.unflatten(c);
    bool keep = true;
    for (int a = 0; a < grid.dim(); ++a) keep = keep && idx[a] % stride == 0;
    if (keep) centers.push_back(c);
  }

  Eigen::VectorXcd g_hat = g.cast<std::complex<double>>();
  detail::fft_all_axes<double>(grid, g_hat, false);
  const double total_content = g.sum();
  for (double radius : dyadic_radii(grid)) {
    BallWitness w{radius, 0, 0.0};
    if (radius >= limit * (1.0 - kRadiusSlack)) {
      w.value = ball_value(total_content, radius, p, mu, cell);
    } else {
      // The ball is symmetric, so correlation equals convolution.
      const auto ball = ball_spectrum(grid, radius);
      Eigen::VectorXcd conv = g_hat.cwiseProduct(*ball);
      detail::fft_all_axes<double>(grid, conv, true);
      for (Eigen::Index c : centers) {
        const double v = ball_value(conv[c].real(), radius, p, mu, cell);
        if (v > w.value) {
          w.value = v;
          w.center = c;
        }
      }
    }
    report.witnesses.push_back(w);
  }
  return report;
}

bool use_exhaustive(const BoxGrid& grid, BallFamilyKind kind) {
  if (kind == BallFamilyKind::Exhaustive) return true;
  if (kind == BallFamilyKind::Dyadic) return false;
  for (int s : grid.sizes()) {
    if (s > 32) return false;
  }
  return true;
}

}  // namespace

double ball_radius_limit(const BoxGrid& grid) {
  double r2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double d = 0.5 * grid.size(a) * grid.spacing(a);
    r2 += d * d;
  }
  return std::sqrt(r2);
}

NormReport morrey_norm(const GridFunction& f, double p, double mu, const SpaceParams& params) {
  check_exponents(f.grid, p, mu, "morrey_norm");
  NormReport report;
  if (use_exhaustive(f.grid, params.family)) {
    report = morrey_exhaustive(f, p, mu);
  } else {
    int stride = params.center_stride;
    if (stride <= 0) stride = f.grid.dim() == 1 ? 1 : 2;
    report = morrey_dyadic(f, p, mu, stride);
  }
  report.kind = "morrey";
  report.p = p;
  report.q = p;
  report.mu = mu;
  finish_report(report);
  return report;
}

NormReport morrey_norm_brute_force(const GridFunction& f, double p, double mu) {
  const BoxGrid& grid = f.grid;
  check_exponents(grid, p, mu, "morrey_norm_brute_force");
  const Eigen::Index total = grid.total();
  const double cell = grid.cell_volume();
  const double r_min = 2.0 * min_spacing(grid) * (1.0 - kRadiusSlack);

  // Every distance attained from one center (the set is translation invariant).
  std::vector<double> radii;
  for (Eigen::Index i = 0; i < total; ++i) {
    const double r = std::sqrt(offset_distance_sq(grid, i));
    if (r >= r_min) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  std::vector<double> distinct;
  for (double r : radii) {
    if (distinct.empty() || r > distinct.back() * (1.0 + kRadiusSlack)) distinct.push_back(r);
  }

  auto distance_sq = [&](Eigen::Index a, Eigen::Index b) {
    const auto ia = grid.unflatten(a);
    const auto ib = grid.unflatten(b);
    double d2 = 0.0;
    for (int ax = 0; ax < grid.dim(); ++ax) {
      const int diff = std::abs(ia[ax] - ib[ax]);
      const double d = std::min(diff, grid.size(ax) - diff) * grid.spacing(ax);
      d2 += d * d;
    }
    return d2;
  };

  NormReport report;
  report.kind = "morrey";
  report.p = p;
  report.q = p;
  report.mu = mu;
  report.exhaustive = true;
  for (double r : distinct) {
    BallWitness w{r, 0, 0.0};
    const double r2 = r * r * (1.0 + 2.0 * kRadiusSlack);
    for (Eigen::Index c = 0; c < total; ++c) {
      double content = 0.0;
      for (Eigen::Index j = 0; j < total; ++j) {
        if (distance_sq(c, j) <= r2) content += std::pow(std::abs(f.values[j]), p);
      }
      const double v = ball_value(content, r, p, mu, cell);
      if (v > w.value) {
        w.value = v;
        w.center = c;
      }
    }
    report.witnesses.push_back(w);
  }
  finish_report(report);
  return report;
}

NormReport sobolev_morrey_norm(const GridFunction& f, double s, double p, double mu,
                               const SpaceParams& params) {
  if (s == 0.0) {
    NormReport r = morrey_norm(f, p, mu, params);
    r.kind = "sobolev_morrey";
    return r;
  }
  const double scale = f.values.cwiseAbs().maxCoeff();
  if (s < 0.0 && std::abs(mean(f)) > 1e-12 * scale) {
    throw ModuloPolynomialsError(
        "sobolev_morrey_norm: negative order needs a mean-free field (defined modulo polynomials)");
  }
  const GridFunction g = inverse(apply_sobolev(forward(f), s));
  NormReport r = morrey_norm(g, p, mu, params);
  r.kind = "sobolev_morrey";
  r.s = s;
  return r;
}

double LPPartition::psi(double t) {
  if (!(t > 0.5 && t < 2.0)) return 0.0;
  return std::exp(-1.0 / ((t - 0.5) * (2.0 - t)));
}

double LPPartition::profile(int j, double xi_abs) {
  if (!(xi_abs > 0.0)) return 0.0;
  const double num = psi(std::ldexp(xi_abs, -j));
  if (num == 0.0) return 0.0;
  const int centre = static_cast<int>(std::floor(std::log2(xi_abs)));
  double den = 0.0;
  for (int i = centre - 2; i <= centre + 2; ++i) den += psi(std::ldexp(xi_abs, -i));
  return num / den;
}

namespace {

double lattice_xi_abs(const BoxGrid& grid, Eigen::Index i) {
  return grid.frequency_step() * std::sqrt(static_cast<double>(grid.wavenumber_norm2(i)));
}

// Scales i with psi(2^-i |xi|) > 0 lie strictly inside (log2|xi| - 1, log2|xi| + 1).
bool covered(double xi_abs, int j_min, int j_max) {
  const double l = std::log2(xi_abs);
  return std::floor(l - 1.0) + 1.0 >= j_min && std::ceil(l + 1.0) - 1.0 <= j_max;
}

}  // namespace

LPPartition::LPPartition(const BoxGrid& grid, std::optional<int> j_min, std::optional<int> j_max)
    : grid_(grid) {
  double xi_min = std::numeric_limits<double>::infinity();
  double xi_max = 0.0;
  for (Eigen::Index i = 1; i < grid.total(); ++i) {
    const double x = lattice_xi_abs(grid, i);
    if (x > 0.0) {
      xi_min = std::min(xi_min, x);
      xi_max = std::max(xi_max, x);
    }
  }
  j_min_ = j_min.value_or(static_cast<int>(std::floor(std::log2(xi_min))) - 1);
  j_max_ = j_max.value_or(static_cast<int>(std::ceil(std::log2(xi_max))) + 1);
  if (j_max_ < j_min_) throw DomainError("LPPartition: empty block range");
  for (int j = j_min_; j <= j_max_; ++j) {
    Eigen::VectorXd m(grid.total());
    for (Eigen::Index i = 0; i < grid.total(); ++i) m[i] = profile(j, lattice_xi_abs(grid, i));
    masks_.push_back(std::move(m));
  }
}

const Eigen::VectorXd& LPPartition::mask(int j) const {
  if (j < j_min_ || j > j_max_) {
    throw PreconditionError("LPPartition: block " + std::to_string(j) + " outside [" +
                            std::to_string(j_min_) + ", " + std::to_string(j_max_) + "]");
  }
  return masks_[j - j_min_];
}

double LPPartition::partition_residue() const {
  double worst = 0.0;
  for (Eigen::Index i = 1; i < grid_.total(); ++i) {
    const double x = lattice_xi_abs(grid_, i);
    if (!covered(x, j_min_, j_max_)) continue;
    double sum = 0.0;
    for (const auto& m : masks_) sum += m[i];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

bool LPPartition::covers_lattice() const {
  for (Eigen::Index i = 1; i < grid_.total(); ++i) {
    if (!covered(lattice_xi_abs(grid_, i), j_min_, j_max_)) return false;
  }
  return true;
}

GridFunction lp_block(const GridFunction& f, int j, const LPPartition& partition) {
  if (f.grid != partition.grid()) throw PreconditionError("lp_block: partition built for another grid");
  const Eigen::VectorXd& m = partition.mask(j);
  SpectralField F = hermitian_part(forward(f));
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) F.coeffs[i] *= m[i];
  return inverse(F);
}

NormReport besov_morrey_norm(const GridFunction& f, double s, double q, double mu, double r,
                             const SpaceParams& params, const LPPartition* partition) {
  check_exponents(f.grid, q, mu, "besov_morrey_norm");
  if (!(r >= 1.0)) throw DomainError("besov_morrey_norm: r must be >= 1 or infinite");
  std::optional<LPPartition> owned;
  if (!partition) {
    owned.emplace(f.grid, params.j_min, params.j_max);
    partition = &*owned;
  }
  NormReport report;
  report.kind = "besov_morrey";
  report.s = s;
  report.p = q;
  report.q = q;
  report.mu = mu;
  report.r = r;
  report.mean = mean(f);

  const SpectralField F = hermitian_part(forward(f));
  SpectralField covered_part(f.grid);
  double sum_r = 0.0;
  double best = 0.0;
  for (int j = partition->j_min(); j <= partition->j_max(); ++j) {
    const Eigen::VectorXd& m = partition->mask(j);
    SpectralField block(f.grid);
    for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) block.coeffs[i] = F.coeffs[i] * m[i];
    covered_part.coeffs += block.coeffs;
    const GridFunction b = inverse(block);
    const NormReport inner = morrey_norm(b, q, mu, params);
    const double weighted = std::pow(2.0, j * s) * inner.value;
    report.blocks.push_back({j, weighted});
    report.witnesses.push_back({inner.best_radius, inner.best_center, weighted});
    if (weighted > best) {
      best = weighted;
      report.best_j = j;
      report.best_radius = inner.best_radius;
      report.best_center = inner.best_center;
    }
    if (!std::isinf(r)) sum_r += std::pow(weighted, r);
  }
  report.value = std::isinf(r) ? best : std::pow(sum_r, 1.0 / r);

  // Spectral content of the mean-free part that no block sees.
  double missed = 0.0;
  double energy = 0.0;
  for (Eigen::Index i = 1; i < F.coeffs.size(); ++i) {
    missed += std::norm(F.coeffs[i] - covered_part.coeffs[i]);
    energy += std::norm(F.coeffs[i]);
  }
  if (energy > 0.0 && missed > 1e-16 * energy) {
    report.warnings.push_back("block range too narrow for the spectral support; value is a lower bound");
  }
  report.radius_count = static_cast<int>(report.blocks.size());
  return report;
}

HolderCheck check_holder(const GridFunction& f, const GridFunction& g, double p1, double mu1,
                         double p2, double mu2, const SpaceParams& params) {
  if (f.grid != g.grid) throw PreconditionError("check_holder: grids differ");
  if (!std::isfinite(p1) || !std::isfinite(p2)) {
    throw DomainError("check_holder: both exponents must be finite");
  }
  HolderCheck out;
  out.p3 = 1.0 / (1.0 / p1 + 1.0 / p2);
  if (out.p3 < 1.0) throw DomainError("check_holder: 1/p1 + 1/p2 must not exceed 1");
  out.mu3 = out.p3 * (mu1 / p1 + mu2 / p2);
  const GridFunction fg(f.grid, f.values.cwiseProduct(g.values));
  out.lhs = morrey_norm(fg, out.p3, out.mu3, params).value;
  out.rhs = morrey_norm(f, p1, mu1, params).value * morrey_norm(g, p2, mu2, params).value;
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

double xqp_norm(const Trajectory& traj, double p, double q, double mu, double eta, double sigma,
                const SpaceParams& params) {
  if (traj.size() == 0) return 0.0;
  const LPPartition partition(traj.grid(), params.j_min, params.j_max);
  double besov = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (!(t > 0.0)) continue;
    const GridFunction& u = traj.states[k];
    if (u.values.cwiseAbs().maxCoeff() == 0.0) continue;
    besov = std::max(besov, besov_morrey_norm(u, sigma, p, mu,
                                              std::numeric_limits<double>::infinity(), params,
                                              &partition).value);
    weighted = std::max(weighted, std::pow(t, eta) * morrey_norm(u, q, mu, params).value);
  }
  return besov + weighted;
}

}  // namespace fhw
