#include <doctest.h>

#include <fhw/errors.hpp>
#include <fhw/special_functions.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"

using namespace fhw;
using doctest::Approx;

TEST_CASE("gamma at closed-form points") {
  CHECK(fhw::gamma(1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(fhw::gamma(0.5) == Approx(1.7724538509055160).epsilon(1e-15));
  CHECK(fhw::gamma(5.5) == Approx(52.34277778455352).epsilon(1e-14));
  CHECK_THROWS_AS(fhw::gamma(0.0), DomainError);
  CHECK_THROWS_AS(fhw::gamma(-1.5), DomainError);
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-2.0) == 0.0);
  CHECK(reciprocal_gamma(-0.5) == Approx(-0.5 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("beta function") {
  CHECK(beta_fn(1.0, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(beta_fn(2.0, 3.0) == Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(beta_fn(0.5, 0.5) == Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(beta_fn(0.3, 1.7) == Approx(oracle::beta_quadrature(0.3, 1.7)).epsilon(1e-10));
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
}

TEST_CASE("ml_one special values") {
  CHECK(ml_one(1.0, 2.0) == Approx(0.1353352832366127).epsilon(1e-15));
  for (double alpha : {1.0, 1.3, 1.5, 2.0}) CHECK(ml_one(alpha, 0.0) == 1.0);
  CHECK(std::abs(ml_one(2.0, std::numbers::pi * std::numbers::pi / 4.0)) < 1e-14);
  CHECK(ml_one(1.5, 1.0) == Approx(oracle::ml_series(1.5, 1.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("ml_one rejects arguments outside the domain") {
  CHECK_THROWS_AS(ml_one(0.9, 1.0), DomainError);
  CHECK_THROWS_AS(ml_one(2.1, 1.0), DomainError);
  CHECK_THROWS_AS(ml_one(1.5, -1.0), DomainError);
}

TEST_CASE("ml_one against the wide series oracle across both paths") {
  for (double alpha : {1.05, 1.3, 1.5, 1.7, 1.95}) {
    for (double x : {0.01, 0.7, 3.0, 4.99, 5.01, 9.0, 20.0, 35.0, 50.0}) {
      const double ref = oracle::ml_series(alpha, 1.0, x);
      INFO("alpha = " << alpha << ", x = " << x);
      CHECK(std::abs(ml_one(alpha, x) - ref) <= 1e-9 * std::abs(ref));
    }
  }
}

TEST_CASE("path selection follows x_switch and can be forced") {
  CHECK(ml_one_eval(1.5, 2.0).path == MLPath::Series);
  CHECK(ml_one_eval(1.5, 8.0).path == MLPath::Decomposition);
  CHECK(ml_one_eval(1.0, 8.0).path == MLPath::Exact);
  MLParams forced;
  forced.path = MLPath::Decomposition;
  const MLValue d = ml_one_eval(1.5, 2.0, forced);
  CHECK(d.path == MLPath::Decomposition);
  CHECK(d.value == Approx(ml_series(1.5, 1.0, 2.0)).epsilon(1e-10));
}

TEST_CASE("l_alpha remainder") {
  CHECK(l_alpha(1.5, 0.0) == Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(l_alpha(1.25, 0.0) == Approx(-0.6).epsilon(1e-14));
  CHECK_THROWS_AS(l_alpha(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(l_alpha(2.0, 1.0), DomainError);
  MLParams series;
  series.path = MLPath::Series;
  MLParams decomposition;
  decomposition.path = MLPath::Decomposition;
  CHECK(ml_one(1.5, 4.0, decomposition) == Approx(ml_one(1.5, 4.0, series)).epsilon(1e-8));
}

TEST_CASE("ml_two special values and oracle") {
  for (double x : {0.0, 0.5, 3.0, 12.0}) CHECK(ml_two(1.0, 1.0, x) == Approx(std::exp(-x)).epsilon(1e-13));
  CHECK(ml_two(1.5, 1.5, 0.0) == Approx(1.0 / std::tgamma(1.5)).epsilon(1e-15));
  CHECK(ml_two(1.5, 1.5, 1.0) == Approx(oracle::ml_series(1.5, 1.5, 1.0)).epsilon(1e-13));
}

TEST_CASE("ml_two for the Duhamel parameters b = alpha, alpha + 1, alpha + 2") {
  for (double alpha : {1.0, 1.1, 1.5, 1.9}) {
    for (double b : {alpha, alpha + 1.0, alpha + 2.0}) {
      for (double x : {0.5, 4.0, 6.0, 15.0, 30.0, 50.0}) {
        const double ref = oracle::ml_series(alpha, b, x);
        INFO("alpha = " << alpha << ", b = " << b << ", x = " << x);
        CHECK(std::abs(ml_two(alpha, b, x) - ref) <= 1e-8 * std::max(std::abs(ref), 1e-3));
      }
    }
  }
}

TEST_CASE("small-time limit: E_alpha(-t^alpha x) increases to 1") {
  for (double alpha : {1.2, 1.8}) {
    double previous = -1.0;
    for (int m = 0; m <= 20; ++m) {
      const double t = std::ldexp(1.0, -m);
      const double v = ml_one(alpha, std::pow(t, alpha) * 3.0);
      CHECK(v >= previous);
      previous = v;
    }
    CHECK(previous == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("Chebyshev table reproduces direct evaluation") {
  const MittagLefflerTable table(1.5, 1.5);
  CHECK(table.segment_count() > 0);
  CHECK(table.max_fit_error() < 1e-11);
  for (double x = 0.0; x < 200.0; x += 0.37) {
    CHECK(std::abs(table(x) - ml_two(1.5, 1.5, x)) < 1e-11);
  }
}

TEST_CASE("symbol bound scan") {
  std::vector<double> xi{1e-8};
  for (int i = 1; i <= 400; ++i) xi.push_back(0.02 * i);
  const SymbolBoundReport heat = symbol_bound_scan(1.0, 0.0, xi, 0);
  CHECK(heat.bound == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(symbol_bound_scan(1.5, 0.0, std::vector<double>{0.0, 1.0}, 0), DomainError);
  CHECK(symbol_bound_scan(1.5, 0.0, xi, 0).bound <= 1.0);
  const SymbolBoundReport first = symbol_bound_scan(1.5, 1.0, xi, 1);
  CHECK(std::isfinite(first.bound));
  CHECK(first.per_order.size() == 2);
}
