#include <doctest.h>

#include <fhw/grid.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace fhw;
using doctest::Approx;

namespace {

GridFunction random_field(const BoxGrid& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  GridFunction f(grid);
  for (Eigen::Index i = 0; i < grid.total(); ++i) f.values[i] = normal(rng);
  return f;
}

Eigen::Index index_of(const BoxGrid& grid, std::array<int, 3> wave) {
  for (int a = 0; a < grid.dim(); ++a) wave[a] = (wave[a] + grid.size(a)) % grid.size(a);
  return grid.flatten(wave);
}

}  // namespace

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS_AS(BoxGrid(0, 16, 1.0), DomainError);
  CHECK_THROWS_AS(BoxGrid(4, 16, 1.0), DomainError);
  CHECK_THROWS_AS(BoxGrid(1, 12, 1.0), DomainError);
  CHECK_THROWS_AS(BoxGrid(1, 4, 1.0), DomainError);
  CHECK_THROWS_AS(BoxGrid(2, 16, 0.0), DomainError);
  const BoxGrid g({16, 8}, 2.0);
  CHECK(g.total() == 128);
  CHECK(g.spacing(1) == 0.5);
  CHECK(g.coordinate(0, 0) == -2.0);
}

TEST_CASE("flat index round trip and mirror") {
  const BoxGrid g({8, 16, 8}, 1.0);
  for (Eigen::Index i = 0; i < g.total(); i += 7) {
    CHECK(g.flatten(g.unflatten(i)) == i);
    CHECK(g.mirror(g.mirror(i)) == i);
    const auto idx = g.unflatten(i);
    if (idx[0] != 4 && idx[1] != 8 && idx[2] != 4) {
      CHECK((g.frequency(i) + g.frequency(g.mirror(i))).norm() == 0.0);
    }
  }
}

TEST_CASE("constant field transforms to its integral") {
  const BoxGrid g(2, 16, 3.0);
  GridFunction f(g);
  f.values.setConstant(2.5);
  const SpectralField F = forward(f);
  CHECK(F.coeffs[0].real() == Approx(2.5 * 36.0).epsilon(1e-14));
  double rest = 0.0;
  for (Eigen::Index i = 1; i < g.total(); ++i) rest = std::max(rest, std::abs(F.coeffs[i]));
  CHECK(rest < 1e-12);
}

TEST_CASE("cos(pi x / L) has coefficients L at k = +-1") {
  const double L = 2.0;
  const BoxGrid g(1, 32, L);
  const GridFunction f = GridFunction::sample(g, [&](const Frequency& x) { return std::cos(std::numbers::pi * x[0] / L); });
  const SpectralField F = forward(f);
  for (Eigen::Index i = 0; i < g.total(); ++i) {
    const int k = g.wavenumber(0, static_cast<int>(i));
    if (std::abs(k) == 1) {
      CHECK(F.coeffs[i].real() == Approx(L).epsilon(1e-13));
      CHECK(std::abs(F.coeffs[i].imag()) < 1e-13);
    } else {
      CHECK(std::abs(F.coeffs[i]) < 1e-13);
    }
  }
}

TEST_CASE("forward then inverse is the identity") {
  for (const BoxGrid& g : {BoxGrid(1, 64, 1.0), BoxGrid({16, 32}, 2.0), BoxGrid(3, 8, 5.0)}) {
    const GridFunction f = random_field(g, 1);
    InverseReport report;
    const GridFunction back = inverse(forward(f), &report);
    CHECK((back.values - f.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(report.imaginary_residue < 1e-14);
  }
  const BoxGrid g(2, 8, 1.0);
  CHECK(inverse(SpectralField(g)).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inverse rejects a non-Hermitian field") {
  const BoxGrid g(1, 16, 1.0);
  SpectralField F(g);
  F.coeffs[1] = {1.0, 0.0};
  CHECK_THROWS_AS(inverse(F), ConsistencyError);
  F.coeffs[g.mirror(1)] = {1.0, 0.0};
  CHECK_NOTHROW(inverse(F));
  F.coeffs[1] += std::complex<double>(0.0, 1.0);
  CHECK(hermitian_defect(hermitian_part(F)) == 0.0);
}

TEST_CASE("single cosine pair inverts to a cosine") {
  const BoxGrid g(2, 16, std::numbers::pi);
  SpectralField F(g);
  const double volume = std::pow(2.0 * std::numbers::pi, 2);
  F.coeffs[index_of(g, {2, -1, 0})] = 0.5 * volume;
  F.coeffs[index_of(g, {-2, 1, 0})] = 0.5 * volume;
  const GridFunction f = inverse(F);
  for (Eigen::Index i = 0; i < g.total(); ++i) {
    const Frequency x = g.position(i);
    CHECK(f.values[i] == Approx(std::cos(2.0 * x[0] - x[1])).epsilon(1e-12));
  }
}

TEST_CASE("multipliers") {
  const BoxGrid g(2, 16, 2.0);
  const GridFunction f = random_field(g, 2);
  const SpectralField F = forward(f);
  const SpectralField same = apply_multiplier(F, [](const Frequency&) { return 1.0; });
  CHECK((same.coeffs - F.coeffs).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::Index k = index_of(g, {1, 2, 0});
  SpectralField mode(g);
  mode.coeffs[k] = 1.0;
  const SpectralField lap = apply_multiplier(mode, [](const Frequency& xi) { return xi.squaredNorm(); });
  CHECK(lap.coeffs[k].real() == Approx(5.0 * std::pow(std::numbers::pi / 2.0, 2)).epsilon(1e-14));

  CHECK_THROWS_AS(apply_multiplier(F, [](const Frequency&) { return std::nan(""); }), PropagationError);
  CHECK_THROWS_AS(apply_radial_multiplier(F, [](double) { return std::nan(""); }), PropagationError);
}

TEST_CASE("Sobolev multipliers compose on mean-free fields") {
  const BoxGrid g(2, 16, 2.0);
  GridFunction f = random_field(g, 3);
  f.values.array() -= f.values.mean();
  bool modulo = true;
  const SpectralField up = apply_sobolev(forward(f), 1.3, &modulo);
  CHECK_FALSE(modulo);
  const GridFunction back = inverse(apply_sobolev(up, -1.3));
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() < 1e-12);

  const GridFunction with_mean = random_field(g, 4);
  apply_sobolev(forward(with_mean), -1.0, &modulo);
  CHECK(modulo);
}

TEST_CASE("radial multiplier agrees with the general one") {
  const BoxGrid g(3, 8, 1.5);
  const SpectralField F = forward(random_field(g, 5));
  const SpectralField a = apply_multiplier(F, [](const Frequency& xi) { return std::exp(-0.1 * xi.squaredNorm()); });
  const SpectralField b = apply_radial_multiplier(F, [](double xi2) { return std::exp(-0.1 * xi2); });
  CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dealiasing mask") {
  const BoxGrid g(2, 32, 1.0);
  const SpectralField F = forward(random_field(g, 6));
  const SpectralField once = dealias(F);
  const SpectralField twice = dealias(once);
  CHECK((once.coeffs - twice.coeffs).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::Index low = index_of(g, {3, -5, 0});
  CHECK(once.coeffs[low] == F.coeffs[low]);

  SpectralField high(g);
  high.coeffs[index_of(g, {11, 0, 0})] = 1.0;
  high.coeffs[index_of(g, {0, -12, 0})] = 1.0;
  CHECK(dealias(high).coeffs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("discrete norms and mean") {
  const BoxGrid g(1, 16, 1.0);
  GridFunction f(g);
  f.values.setConstant(-3.0);
  CHECK(mean(f) == -3.0);
  CHECK(lp_norm(f, 2.0) == Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == 3.0);
}
