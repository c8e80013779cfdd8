#include <doctest.h>

#include <fhw/propagator.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"

using namespace fhw;
using doctest::Approx;

namespace {

ModelParams with_alpha(double alpha) {
  ModelParams m;
  m.alpha = alpha;
  return m;
}

}  // namespace

TEST_CASE("alpha = 1 propagates a sine mode as e^(-t) sin") {
  const BoxGrid grid(1, 32, std::numbers::pi);
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::sin(x[0]); });
  for (double t : {0.1, 1.0, 3.0}) {
    const GridFunction u = linear_propagate(u0, t, with_alpha(1.0));
    CHECK((u.values - std::exp(-t) * u0.values).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("a single mode decays by the series-oracle multiplier") {
  const BoxGrid grid(2, 16, std::numbers::pi);
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::cos(2.0 * x[0] + x[1]); });
  const double t = 1.7;
  const double alpha = 1.6;
  const double m = oracle::ml_series(alpha, 1.0, std::pow(t, alpha) * 5.0);
  const GridFunction u = linear_propagate(u0, t, with_alpha(alpha));
  CHECK((u.values - m * u0.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("t = 0 returns the data exactly") {
  const BoxGrid grid(2, 16, 2.0);
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-x.squaredNorm()) + x[0]; });
  const GridFunction u = linear_propagate(u0, 0.0, with_alpha(1.5));
  CHECK((u.values - u0.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("alpha outside [1, 2) is rejected") {
  const BoxGrid grid(1, 16, 1.0);
  const GridFunction u0(grid);
  CHECK_THROWS_AS(linear_propagate(u0, 1.0, with_alpha(2.0)), DomainError);
  CHECK_THROWS_AS(linear_propagate(u0, 1.0, with_alpha(0.5)), DomainError);
  CHECK_THROWS_AS(PropagatorContext(with_alpha(2.5), grid), DomainError);
}

TEST_CASE("context shells, caching and agreement with the direct path") {
  const BoxGrid grid(2, 16, 3.0);
  const PropagatorContext ctx(with_alpha(1.5), grid);
  CHECK(ctx.shells().front() == 0);
  CHECK(ctx.max_shell() == 2 * 8 * 8);
  for (Eigen::Index i = 0; i < grid.total(); ++i) CHECK(ctx.shell_of_mode()[i] == grid.wavenumber_norm2(i));

  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-x.squaredNorm()); });
  const GridFunction a = ctx.propagate(u0, 0.8);
  const GridFunction b = linear_propagate(u0, 0.8, with_alpha(1.5));
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
  ctx.propagate(u0, 0.8);
  CHECK(ctx.cache_size() == 1);
  ctx.propagate(u0, 0.9);
  CHECK(ctx.cache_size() == 2);
  CHECK(ctx.multipliers(0.8) == ctx.multipliers(0.8));
}

TEST_CASE("Duhamel multiplier") {
  CHECK(duhamel_multiplier(1.0, 2.0, 0.5, 3.0) == Approx(2.0 * std::exp(-1.5)).epsilon(1e-14));
  CHECK(duhamel_multiplier(1.5, 1.0, 0.25, 0.0) == Approx(std::sqrt(0.25) / std::tgamma(1.5)).epsilon(1e-14));
  const double w = 0.7;
  const double xi2 = 4.0;
  const double ref = std::pow(w, 0.4) * oracle::ml_series(1.4, 1.4, std::pow(w, 1.4) * xi2);
  CHECK(duhamel_multiplier(1.4, 1.0, w, xi2) == Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(duhamel_multiplier(1.5, 1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(duhamel_multiplier(1.5, 1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("kernel: mass, sign and self-similar collapse") {
  std::vector<double> xs;
  const double h = 0.01;
  for (int i = -4000; i <= 4000; ++i) xs.push_back(i * h);
  for (double alpha : {1.0, 1.3, 1.7}) {
    KernelReport report;
    const auto k = kernel_sample_1d(alpha, 1.0, xs, &report);
    double mass = 0.0;
    for (double v : k) mass += h * v;
    CHECK(mass == Approx(1.0).epsilon(1e-6));
    for (double v : k) CHECK(v >= -1e-6);
    CHECK(report.aux_points > 0);
  }
  const auto heat = kernel_sample_1d(1.0, 1.0, std::vector<double>{0.0, 1.0});
  CHECK(heat[0] == Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-8));
  CHECK(heat[1] == Approx(std::exp(-0.25) / std::sqrt(4.0 * std::numbers::pi)).epsilon(1e-8));
  CHECK_THROWS_AS(kernel_sample_1d(1.5, 0.0, std::vector<double>{0.0}), DomainError);
}

TEST_CASE("weak initial trace pairing") {
  const BoxGrid grid(2, 32, 6.0);
  const GridFunction u0 = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-x.squaredNorm()); });
  const GridFunction v = GridFunction::sample(grid, [](const Frequency& x) { return std::exp(-0.5 * x.squaredNorm()); });
  const std::vector<double> ts{1e-1, 1e-2, 1e-3, 1e-4};
  const auto pairing = smalltime_pairing_check(u0, v, ts, with_alpha(1.5));
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(pairing[i] < pairing[i - 1]);
  CHECK(pairing.back() < 1e-3);
  const auto zero = smalltime_pairing_check(GridFunction(grid), v, ts, with_alpha(1.5));
  for (double z : zero) CHECK(z == 0.0);
}
