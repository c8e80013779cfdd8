#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace fhw::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the n-point Gauss-Legendre rule. Rules are computed
/// once per order and cached; the returned reference stays valid for the
/// lifetime of the program.
const GaussRule& gauss_legendre(int n);

/// Apply a rule mapped to [a, b].
template <typename F>
double gauss(const GaussRule& rule, const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

/// Fixed-order rule mapped to [a, b].
template <typename F>
double gauss(const F& f, double a, double b, int n = 16) {
  return gauss(gauss_legendre(n), f, a, b);
}

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int order = 16;
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Globally adaptive Gauss-Legendre quadrature. Each panel carries the
/// difference between its one-panel and two-half-panel estimates; the panel
/// with the largest difference is bisected until the summed estimate meets
/// max(abs_tol, rel_tol |I|) or the panel budget is exhausted.
template <typename F>
QuadratureResult integrate(const F& f, double a, double b,
                           const AdaptiveOptions& opt = {}) {
  QuadratureResult result;
  if (a == b) return result;
  const GaussRule& rule = gauss_legendre(opt.order);
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };
  auto make_panel = [&](double lo, double hi, double whole) {
    const double mid = 0.5 * (lo + hi);
    const double refined = gauss(rule, f, lo, mid) + gauss(rule, f, mid, hi);
    return Panel{lo, hi, refined, std::abs(refined - whole)};
  };
  std::vector<Panel> heap;
  heap.push_back(make_panel(a, b, gauss(rule, f, a, b)));
  double total = heap.front().value;
  double error = heap.front().error;
  while (static_cast<int>(heap.size()) < opt.max_panels) {
    if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(Panel{worst.a, worst.b, worst.value, 0.0});
      std::push_heap(heap.begin(), heap.end());
      error -= worst.error;
      continue;
    }
    const GaussRule& r = rule;
    const double left_whole = gauss(r, f, worst.a, mid);
    const double right_whole = gauss(r, f, mid, worst.b);
    Panel left = make_panel(worst.a, mid, left_whole);
    Panel right = make_panel(mid, worst.b, right_whole);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  // Re-sum to shed the drift of the running updates.
  result.value = 0.0;
  result.error_estimate = 0.0;
  for (const Panel& p : heap) {
    result.value += p.value;
    result.error_estimate += p.error;
  }
  result.panels = static_cast<int>(heap.size());
  return result;
}

/// Integral over [a, b] split at the given interior breakpoints.
template <typename F>
QuadratureResult integrate(const F& f, std::span<const double> breaks,
                           const AdaptiveOptions& opt = {}) {
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    QuadratureResult piece = integrate(f, breaks[i], breaks[i + 1], opt);
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.panels += piece.panels;
  }
  return total;
}

/// Integral over [a, inf) through the map x = a + s / (1 - s).
template <typename F>
QuadratureResult integrate_to_infinity(const F& f, double a,
                                       const AdaptiveOptions& opt = {}) {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    if (one_minus <= 0.0) return 0.0;
    const double x = a + s / one_minus;
    const double value = f(x);
    return std::isfinite(value) ? value / (one_minus * one_minus) : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

}  // namespace fhw::quad
