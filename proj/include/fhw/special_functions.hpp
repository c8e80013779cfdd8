#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace fhw {

/// Evaluation path used for a Mittag-Leffler value.
enum class MLPath {
  Auto,           ///< chosen from x_switch
  Series,         ///< compensated power series
  Decomposition,  ///< pole pair plus branch-cut integral (or its asymptotics)
  Exact           ///< closed form (alpha = 1, or x = 0)
};

std::string_view to_string(MLPath path);

/// Controls for Mittag-Leffler evaluation on the negative real axis.
struct MLParams {
  /// Series below, decomposition above.
  double x_switch = 5.0;
  /// Relative truncation tolerance of the power series.
  double series_tol = 1e-17;
  /// Gauss-Legendre order per panel of the branch-cut integral.
  int quadrature_nodes = 32;
  /// Absolute tolerance of the branch-cut integral.
  double quadrature_tol = 1e-14;
  /// Above x^(1/alpha) >= asymptotic_threshold the branch-cut integral is
  /// replaced by its (optimally truncated) asymptotic expansion.
  double asymptotic_threshold = 40.0;
  /// Path override; Auto selects by x_switch.
  MLPath path = MLPath::Auto;
};

struct MLValue {
  double value = 0.0;
  MLPath path = MLPath::Auto;
};

/// Gamma function for x > 0.
double gamma(double x);

/// 1/Gamma(x) for any real x; zero at the poles.
double reciprocal_gamma(double x);

/// Beta function for x, y > 0.
double beta_fn(double x, double y);

/// E_alpha(-x) for 1 <= alpha <= 2, x >= 0.
double ml_one(double alpha, double x, const MLParams& params = {});
MLValue ml_one_eval(double alpha, double x, const MLParams& params = {});

/// Remainder term of the pole decomposition of E_alpha(-x) for 1 < alpha < 2:
/// (sin(alpha pi)/pi) int_0^inf x s^(alpha-1) e^(-s) /
///   (s^(2 alpha) + 2 x s^alpha cos(alpha pi) + x^2) ds, and 1 - 2/alpha at 0.
double l_alpha(double alpha, double x, const MLParams& params = {});

/// E_{alpha,b}(-x) = sum_k (-x)^k / Gamma(alpha k + b).
double ml_two(double alpha, double b, double x, const MLParams& params = {});
MLValue ml_two_eval(double alpha, double b, double x,
                    const MLParams& params = {});

/// Series path of E_{alpha,b}(-x) (exposed for path cross-checks).
double ml_series(double alpha, double b, double x, double tol = 1e-17);

/// E_{alpha,b}(-x) for fixed (alpha, b) and many x. Between x_switch and the
/// asymptotic threshold the decomposition path is replaced by piecewise
/// Chebyshev interpolants in y = x^(1/alpha), fitted once at construction;
/// elsewhere values come from ml_two.
class MittagLefflerTable {
 public:
  MittagLefflerTable(double alpha, double b, const MLParams& params = {});

  double operator()(double x) const;

  double alpha() const { return alpha_; }
  double b() const { return b_; }
  /// Largest deviation from ml_two seen at the validation points.
  double max_fit_error() const { return max_fit_error_; }
  std::size_t segment_count() const { return segments_.size(); }

 private:
  struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> coeffs;
  };

  Segment fit(double lo, double hi) const;
  double direct(double x) const;

  double alpha_;
  double b_;
  MLParams params_;
  double y_lo_ = 0.0;
  double y_hi_ = 0.0;
  std::vector<Segment> segments_;
  double max_fit_error_ = 0.0;
};

struct SymbolBoundReport {
  /// Constant per derivative order 0..k_max.
  std::vector<double> per_order;
  /// Maximum over orders.
  double bound = 0.0;
  /// Sample where the maximum was attained.
  double argmax_xi = 0.0;
};

/// Scan max over samples of |d^k (|xi|^delta E_alpha(-|xi|^2))| |xi|^k for
/// k = 0..k_max (k_max in {0, 1}; the first derivative by centered
/// differences).
SymbolBoundReport symbol_bound_scan(double alpha, double delta,
                                    std::span<const double> xi_samples,
                                    int k_max);

}  // namespace fhw
