#include "fhw/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "fhw/errors.hpp"
#include "fhw/quadrature.hpp"

namespace fhw {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double v) { return std::isfinite(v) && v == std::nearbyint(v); }

// sin(pi y), exactly zero at (rounding-level) integers so that b = alpha + m
// reproduces the vanishing branch terms.
double sin_pi(double y) {
  if (std::abs(y - std::nearbyint(y)) < 1e-12) return 0.0;
  const double reduced = y - 2.0 * std::nearbyint(0.5 * y);
  return std::sin(kPi * reduced);
}

void check_order(double alpha, const char* who) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) {
    throw DomainError(std::string(who) + ": alpha must lie in [1, 2], got " +
                      std::to_string(alpha));
  }
}

void check_argument(double x, const char* who) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": x must be finite and >= 0, got " +
                      std::to_string(x));
  }
}

// Neumaier-compensated accumulator in extended precision.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double v) {
    const long double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  long double value() const { return sum + carry; }
};

// (2/alpha) Re(s^(1-b) e^s) with s = x^(1/alpha) e^(i pi/alpha): the
// residues at the two simple poles of the Laplace integrand.
double pole_pair(double alpha, double b, double x) {
  const double radius = std::pow(x, 1.0 / alpha);
  const double angle = kPi / alpha;
  const double amplitude =
      (2.0 / alpha) * std::pow(x, (1.0 - b) / alpha) *
      std::exp(radius * std::cos(angle));
  return amplitude * std::cos(radius * std::sin(angle) + (1.0 - b) * angle);
}

// Branch-cut integral of the Laplace inversion in the variable v = r^alpha:
// (1/(alpha pi)) int_0^inf e^(-v^(1/alpha)) v^((1-b)/alpha)
//   [v sin(pi b) - x sin(pi (alpha - b))] / (v^2 + 2 x v cos(pi alpha) + x^2)
double branch_integral(double alpha, double b, double x,
                       const MLParams& params) {
  const double sin_b = sin_pi(b);
  const double sin_ab = sin_pi(alpha - b);
  const double cos_a = std::cos(kPi * alpha);
  const double power = (1.0 - b) / alpha;
  const double lead = sin_ab != 0.0 ? power : power + 1.0;
  // v = u^k removes an integrable endpoint singularity v^lead, lead < 0.
  const double k = lead < 0.0 ? 1.0 / (1.0 + lead) : 1.0;

  auto integrand_v = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double denom = v * v + 2.0 * x * v * cos_a + x * x;
    return std::exp(-std::pow(v, 1.0 / alpha) + power * std::log(v)) *
           (v * sin_b - x * sin_ab) / denom;
  };
  auto integrand_u = [&](double u) {
    if (u <= 0.0) return 0.0;
    if (k == 1.0) return integrand_v(u);
    const double v = std::pow(u, k);
    return integrand_v(v) * k * v / u;
  };

  std::vector<double> breaks_v{0.0};
  if (cos_a < 0.0) breaks_v.push_back(-x * cos_a);
  breaks_v.push_back(x);
  breaks_v.push_back(2.0 * x);
  const double decay = std::pow(45.0, alpha);
  breaks_v.push_back(std::max(4.0 * x, decay));
  std::sort(breaks_v.begin(), breaks_v.end());
  breaks_v.erase(std::unique(breaks_v.begin(), breaks_v.end()), breaks_v.end());

  std::vector<double> breaks_u;
  breaks_u.reserve(breaks_v.size());
  for (double v : breaks_v) breaks_u.push_back(std::pow(v, 1.0 / k));

  quad::AdaptiveOptions opt;
  opt.abs_tol = params.quadrature_tol;
  opt.rel_tol = 1e-14;
  opt.order = params.quadrature_nodes;
  double total = quad::integrate(integrand_u, std::span<const double>(breaks_u), opt).value;
  total += quad::integrate_to_infinity(integrand_u, breaks_u.back(), opt).value;
  return total / (alpha * kPi);
}

// Large-x expansion of the branch-cut integral:
// sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(b - alpha k), optimally truncated.
double branch_asymptotic(double alpha, double b, double x) {
  CompensatedSum acc;
  long double x_power = 1.0L;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 400; ++k) {
    x_power /= x;
    const double rg = reciprocal_gamma(b - alpha * k);
    const long double term = (k % 2 == 1 ? 1.0L : -1.0L) * x_power * rg;
    const double magnitude = std::fabs(static_cast<double>(term));
    if (rg == 0.0) continue;
    if (magnitude > previous) break;
    acc.add(term);
    previous = magnitude;
    if (magnitude < 1e-19 * std::fabs(static_cast<double>(acc.value()))) break;
  }
  return static_cast<double>(acc.value());
}

double decomposition_general(double alpha, double b, double x,
                             const MLParams& params) {
  // The Hankel contour picks up a residue at s = 0 once b >= 1 + alpha;
  // step down with E_{a,b}(-x) = (1/Gamma(b - a) - E_{a,b-a}(-x)) / x.
  if (b >= 1.0 + alpha) {
    return (reciprocal_gamma(b - alpha) - decomposition_general(alpha, b - alpha, x, params)) / x;
  }
  double remainder = 0.0;
  const bool remainder_vanishes =
      alpha == 2.0 && is_integer(b);  // sin terms vanish identically
  if (!remainder_vanishes) {
    if (std::pow(x, 1.0 / alpha) >= params.asymptotic_threshold) {
      remainder = branch_asymptotic(alpha, b, x);
    } else {
      remainder = branch_integral(alpha, b, x, params);
    }
  }
  return pole_pair(alpha, b, x) + remainder;
}

// E_{1,b}(-x) for large x without series cancellation.
double ml_unit_order(double b, double x, const MLParams& params) {
  if (b == 1.0) return std::exp(-x);
  if (b < 1.0) {
    return reciprocal_gamma(b) - x * ml_unit_order(b + 1.0, x, params);
  }
  if (is_integer(b)) {
    // E_{1,m+1}(-x) = (1/Gamma(m) - E_{1,m}(-x)) / x
    double value = std::exp(-x);
    for (int m = 1; m < static_cast<int>(b); ++m) {
      value = (reciprocal_gamma(m) - value) / x;
    }
    return value;
  }
  // E_{1,b}(-x) = (1/Gamma(b)) int_0^1 exp(-x (1 - u^(1/(b-1)))) du
  const double p = 1.0 / (b - 1.0);
  auto integrand = [&](double u) { return std::exp(-x * (1.0 - std::pow(u, p))); };
  quad::AdaptiveOptions opt;
  opt.abs_tol = params.quadrature_tol;
  opt.order = params.quadrature_nodes;
  return reciprocal_gamma(b) * quad::integrate(integrand, 0.0, 1.0, opt).value;
}

}  // namespace

std::string_view to_string(MLPath path) {
  switch (path) {
    case MLPath::Auto:
      return "auto";
    case MLPath::Series:
      return "series";
    case MLPath::Decomposition:
      return "decomposition";
    case MLPath::Exact:
      return "exact";
  }
  return "unknown";
}

double gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("gamma: argument must be positive, got " + std::to_string(x));
  }
  return std::tgamma(x);
}

double reciprocal_gamma(double x) {
  if (x <= 0.0 && is_integer(x)) return 0.0;
  if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
  // |Gamma| through lgamma, sign from the interval between poles.
  const double magnitude = std::exp(-std::lgamma(x));
  if (x > 0.0) return magnitude;
  const long long cell = static_cast<long long>(std::floor(-x));
  return (cell % 2 == 0) ? -magnitude : magnitude;
}

double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw DomainError("beta_fn: arguments must be positive, got (" +
                      std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  if (x + y < 170.0) return std::tgamma(x) * std::tgamma(y) / std::tgamma(x + y);
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double ml_series(double alpha, double b, double x, double tol) {
  if (x == 0.0) return reciprocal_gamma(b);
  const long double log_x = std::log(static_cast<long double>(x));
  const double hump = std::pow(x, 1.0 / alpha);
  CompensatedSum acc;
  for (int k = 0; k < 400; ++k) {
    const long double arg = static_cast<long double>(alpha) * k + b;
    const long double magnitude = std::exp(k * log_x - std::lgamma(arg));
    acc.add(k % 2 == 0 ? magnitude : -magnitude);
    if (magnitude < tol * std::fabs(acc.value()) && alpha * k > hump) break;
  }
  return static_cast<double>(acc.value());
}

MLValue ml_two_eval(double alpha, double b, double x, const MLParams& params) {
  check_order(alpha, "ml_two");
  check_argument(x, "ml_two");
  if (!(b > 0.0)) {
    throw DomainError("ml_two: b must be positive, got " + std::to_string(b));
  }
  if (x == 0.0) return {reciprocal_gamma(b), MLPath::Exact};
  if (alpha == 1.0 && b == 1.0) return {std::exp(-x), MLPath::Exact};

  MLPath path = params.path;
  if (path == MLPath::Auto || path == MLPath::Exact) {
    path = x <= params.x_switch ? MLPath::Series : MLPath::Decomposition;
  }
  if (path == MLPath::Decomposition && alpha == 2.0 && !is_integer(b)) {
    path = MLPath::Series;  // the branch integral is singular at alpha = 2
  }
  if (path == MLPath::Series) {
    return {ml_series(alpha, b, x, params.series_tol), MLPath::Series};
  }
  if (alpha == 1.0) return {ml_unit_order(b, x, params), MLPath::Decomposition};
  return {decomposition_general(alpha, b, x, params), MLPath::Decomposition};
}

double ml_two(double alpha, double b, double x, const MLParams& params) {
  return ml_two_eval(alpha, b, x, params).value;
}

MLValue ml_one_eval(double alpha, double x, const MLParams& params) {
  check_order(alpha, "ml_one");
  check_argument(x, "ml_one");
  if (alpha == 1.0) return {std::exp(-x), MLPath::Exact};
  return ml_two_eval(alpha, 1.0, x, params);
}

double ml_one(double alpha, double x, const MLParams& params) {
  return ml_one_eval(alpha, x, params).value;
}

double l_alpha(double alpha, double x, const MLParams& params) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw DomainError("l_alpha: alpha must lie strictly inside (1, 2), got " +
                      std::to_string(alpha));
  }
  check_argument(x, "l_alpha");
  if (x == 0.0) return 1.0 - 2.0 / alpha;
  if (std::pow(x, 1.0 / alpha) >= params.asymptotic_threshold) {
    return branch_asymptotic(alpha, 1.0, x);
  }
  return branch_integral(alpha, 1.0, x, params);
}

namespace {

constexpr int kChebyshevPoints = 25;
constexpr double kTableTolerance = 1e-13;

double clenshaw(const std::vector<double>& c, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size() - 1; k > 0; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

MittagLefflerTable::MittagLefflerTable(double alpha, double b,
                                       const MLParams& params)
    : alpha_(alpha), b_(b), params_(params) {
  check_order(alpha, "MittagLefflerTable");
  if (!(b > 0.0)) throw DomainError("MittagLefflerTable: b must be positive");
  if (!(alpha > 1.0 && alpha < 2.0) || params.path != MLPath::Auto) return;
  y_lo_ = std::pow(params.x_switch, 1.0 / alpha);
  y_hi_ = params.asymptotic_threshold;
  if (!(y_hi_ > y_lo_)) return;

  std::vector<std::pair<double, double>> pending;
  const int initial = static_cast<int>(std::ceil((y_hi_ - y_lo_) / 2.0));
  for (int i = initial - 1; i >= 0; --i) {
    pending.emplace_back(y_lo_ + (y_hi_ - y_lo_) * i / initial,
                         y_lo_ + (y_hi_ - y_lo_) * (i + 1) / initial);
  }
  // Validation abscissae in [-1, 1], away from the interpolation nodes.
  constexpr double probes[] = {-0.97, -0.61, -0.13, 0.29, 0.71, 0.99};
  while (!pending.empty()) {
    const auto [lo, hi] = pending.back();
    pending.pop_back();
    Segment seg = fit(lo, hi);
    double scale = 0.0;
    for (double c : seg.coeffs) scale += std::abs(c);
    double error = 0.0;
    for (double t : probes) {
      const double y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
      error = std::max(error, std::abs(clenshaw(seg.coeffs, t) -
                                       direct(std::pow(y, alpha_))));
    }
    if (error > kTableTolerance * std::max(scale, 1e-3) && hi - lo > 0.05) {
      const double mid = 0.5 * (lo + hi);
      pending.emplace_back(mid, hi);
      pending.emplace_back(lo, mid);
      continue;
    }
    max_fit_error_ = std::max(max_fit_error_, error);
    segments_.push_back(std::move(seg));
  }
}

double MittagLefflerTable::direct(double x) const {
  MLParams forced = params_;
  forced.path = MLPath::Decomposition;
  return ml_two(alpha_, b_, x, forced);
}

MittagLefflerTable::Segment MittagLefflerTable::fit(double lo, double hi) const {
  constexpr int n = kChebyshevPoints;
  std::array<double, n> values{};
  for (int j = 0; j < n; ++j) {
    const double t = std::cos(kPi * (j + 0.5) / n);
    values[j] = direct(std::pow(0.5 * (lo + hi) + 0.5 * (hi - lo) * t, alpha_));
  }
  Segment seg{lo, hi, std::vector<double>(n, 0.0)};
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += values[j] * std::cos(kPi * k * (j + 0.5) / n);
    seg.coeffs[k] = (k == 0 ? 1.0 : 2.0) * sum / n;
  }
  return seg;
}

double MittagLefflerTable::operator()(double x) const {
  check_argument(x, "MittagLefflerTable");
  if (segments_.empty() || x <= params_.x_switch) return ml_two(alpha_, b_, x, params_);
  const double y = std::pow(x, 1.0 / alpha_);
  if (y >= y_hi_) return ml_two(alpha_, b_, x, params_);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), y,
                             [](double v, const Segment& s) { return v < s.lo; });
  const Segment& seg = *(it == segments_.begin() ? it : std::prev(it));
  const double t = std::clamp((2.0 * y - seg.lo - seg.hi) / (seg.hi - seg.lo), -1.0, 1.0);
  return clenshaw(seg.coeffs, t);
}

SymbolBoundReport symbol_bound_scan(double alpha, double delta,
                                    std::span<const double> xi_samples,
                                    int k_max) {
  check_order(alpha, "symbol_bound_scan");
  if (!(delta >= 0.0 && delta < 2.0)) {
    throw DomainError("symbol_bound_scan: delta must lie in [0, 2)");
  }
  if (k_max < 0 || k_max > 1) {
    throw DomainError("symbol_bound_scan: k_max must be 0 or 1");
  }
  auto symbol = [&](double xi) {
    return std::pow(xi, delta) * ml_one(alpha, xi * xi);
  };
  SymbolBoundReport report;
  report.per_order.assign(k_max + 1, 0.0);
  for (double xi : xi_samples) {
    if (!(xi > 0.0)) throw DomainError("symbol_bound_scan: samples must be positive");
    const double v0 = std::abs(symbol(xi));
    report.per_order[0] = std::max(report.per_order[0], v0);
    double local = v0;
    if (k_max == 1) {
      const double h = 1e-5 * xi;
      const double d1 = (symbol(xi + h) - symbol(xi - h)) / (2.0 * h);
      const double v1 = std::abs(d1) * xi;
      report.per_order[1] = std::max(report.per_order[1], v1);
      local = std::max(local, v1);
    }
    if (local > report.bound) {
      report.bound = local;
      report.argmax_xi = xi;
    }
  }
  return report;
}

}  // namespace fhw
