#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fhw/errors.hpp"

namespace fhw {

/// Frequency vector; at most three components, stored inline.
using Frequency = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// Periodic cubic box [-L, L)^n sampled with sizes[d] points along axis d.
class BoxGrid {
 public:
  BoxGrid() = default;

  BoxGrid(int n, int points_per_axis, double half_length)
      : BoxGrid(std::vector<int>(n > 0 ? n : 0, points_per_axis), half_length) {
    if (n < 1 || n > 3) throw DomainError("BoxGrid: dimension must be 1, 2 or 3");
  }

  BoxGrid(std::vector<int> sizes, double half_length)
      : sizes_(std::move(sizes)), half_length_(half_length) {
    if (sizes_.empty() || sizes_.size() > 3) {
      throw DomainError("BoxGrid: dimension must be 1, 2 or 3");
    }
    for (int s : sizes_) {
      if (s < 8 || (s & (s - 1)) != 0) {
        throw DomainError("BoxGrid: sizes must be powers of two >= 8, got " +
                          std::to_string(s));
      }
    }
    if (!(half_length_ > 0.0) || !std::isfinite(half_length_)) {
      throw DomainError("BoxGrid: half length must be positive");
    }
  }

  int dim() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  int size(int axis) const { return sizes_[axis]; }
  double half_length() const { return half_length_; }
  double spacing(int axis) const { return 2.0 * half_length_ / sizes_[axis]; }

  /// Product of the spacings (the cell volume h^n).
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= spacing(a);
    return v;
  }

  /// Total number of samples.
  Eigen::Index total() const {
    Eigen::Index t = 1;
    for (int s : sizes_) t *= s;
    return t;
  }

  /// Lattice spacing pi / L of the angular frequencies.
  double frequency_step() const { return std::numbers::pi / half_length_; }

  double coordinate(int axis, int index) const {
    return -half_length_ + index * spacing(axis);
  }

  /// Signed wavenumber of FFT-ordered index i: i for i < N/2, i - N otherwise.
  int wavenumber(int axis, int index) const {
    return index < sizes_[axis] / 2 ? index : index - sizes_[axis];
  }

  /// Multi-index of a row-major flat index (last axis fastest).
  std::array<int, 3> unflatten(Eigen::Index flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % sizes_[a]);
      flat /= sizes_[a];
    }
    return idx;
  }

  Eigen::Index flatten(const std::array<int, 3>& idx) const {
    Eigen::Index flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * sizes_[a] + idx[a];
    return flat;
  }

  /// Integer |k|^2 of the lattice mode at a flat FFT-ordered index; the
  /// physical |xi|^2 is frequency_step()^2 times this.
  long long wavenumber_norm2(Eigen::Index flat) const {
    const auto idx = unflatten(flat);
    long long s = 0;
    for (int a = 0; a < dim(); ++a) {
      const long long k = wavenumber(a, idx[a]);
      s += k * k;
    }
    return s;
  }

  Frequency frequency(Eigen::Index flat) const {
    const auto idx = unflatten(flat);
    Frequency xi(dim());
    for (int a = 0; a < dim(); ++a) xi[a] = frequency_step() * wavenumber(a, idx[a]);
    return xi;
  }

  /// Flat index of the mode -k (the Hermitian partner).
  Eigen::Index mirror(Eigen::Index flat) const {
    auto idx = unflatten(flat);
    for (int a = 0; a < dim(); ++a) idx[a] = (sizes_[a] - idx[a]) % sizes_[a];
    return flatten(idx);
  }

  /// Sample position of a flat index.
  Frequency position(Eigen::Index flat) const {
    const auto idx = unflatten(flat);
    Frequency x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, idx[a]);
    return x;
  }

  friend bool operator==(const BoxGrid& a, const BoxGrid& b) {
    return a.sizes_ == b.sizes_ && a.half_length_ == b.half_length_;
  }
  friend bool operator!=(const BoxGrid& a, const BoxGrid& b) { return !(a == b); }

  std::string describe() const {
    std::ostringstream os;
    os << "n=" << dim() << " sizes=";
    for (int a = 0; a < dim(); ++a) os << (a ? "x" : "") << sizes_[a];
    os << " L=" << half_length_;
    return os.str();
  }

 private:
  std::vector<int> sizes_;
  double half_length_ = 1.0;
};

/// Real samples on a BoxGrid, row-major.
template <typename Scalar>
struct BasicGridFunction {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BoxGrid grid;
  Values values;

  BasicGridFunction() = default;
  explicit BasicGridFunction(const BoxGrid& g) : grid(g), values(Values::Zero(g.total())) {}
  BasicGridFunction(const BoxGrid& g, Values v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.total()) {
      throw PreconditionError("GridFunction: value count does not match the grid");
    }
  }

  /// Sample a callable of the position vector.
  template <typename F>
  static BasicGridFunction sample(const BoxGrid& g, const F& f) {
    BasicGridFunction out(g);
    for (Eigen::Index i = 0; i < g.total(); ++i) out.values[i] = static_cast<Scalar>(f(g.position(i)));
    return out;
  }
};

/// Fourier coefficients on the frequency lattice, in FFT order per axis.
template <typename Scalar>
struct BasicSpectralField {
  using Complex = std::complex<Scalar>;
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  BoxGrid grid;
  Coeffs coeffs;

  BasicSpectralField() = default;
  explicit BasicSpectralField(const BoxGrid& g) : grid(g), coeffs(Coeffs::Zero(g.total())) {}
  BasicSpectralField(const BoxGrid& g, Coeffs c) : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != grid.total()) {
      throw PreconditionError("SpectralField: coefficient count does not match the grid");
    }
  }
};

using GridFunction = BasicGridFunction<double>;
using SpectralField = BasicSpectralField<double>;

namespace detail {

// In-place complex FFT along every axis of a row-major array.
template <typename Scalar>
void fft_all_axes(const BoxGrid& grid, Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& data,
                  bool inverse) {
  thread_local Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> line;
  std::vector<std::complex<Scalar>> out;
  const int n = grid.dim();
  for (int axis = 0; axis < n; ++axis) {
    const int len = grid.size(axis);
    Eigen::Index stride = 1;
    for (int a = axis + 1; a < n; ++a) stride *= grid.size(a);
    const Eigen::Index block = stride * len;
    line.resize(len);
    for (Eigen::Index outer = 0; outer < data.size(); outer += block) {
      for (Eigen::Index inner = 0; inner < stride; ++inner) {
        const Eigen::Index base = outer + inner;
        for (int i = 0; i < len; ++i) line[i] = data[base + i * stride];
        if (inverse) {
          fft.inv(out, line);
        } else {
          fft.fwd(out, line);
        }
        for (int i = 0; i < len; ++i) data[base + i * stride] = out[i];
      }
    }
  }
}

// (-1)^(k_1 + ... + k_n) for the FFT-ordered flat index (N even per axis).
inline int checkerboard_sign(const BoxGrid& grid, Eigen::Index flat) {
  const auto idx = grid.unflatten(flat);
  int parity = 0;
  for (int a = 0; a < grid.dim(); ++a) parity += idx[a];
  return (parity % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/// hat f(xi_k) ~ h^n sum_j exp(-i xi_k . x_j) f(x_j), so a unit-mass function
/// has coefficient 1 at xi = 0.
template <typename Scalar>
BasicSpectralField<Scalar> forward(const BasicGridFunction<Scalar>& f) {
  BasicSpectralField<Scalar> out(f.grid);
  out.coeffs = f.values.template cast<std::complex<Scalar>>();
  detail::fft_all_axes<Scalar>(f.grid, out.coeffs, false);
  const Scalar volume = static_cast<Scalar>(f.grid.cell_volume());
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] *= volume * static_cast<Scalar>(detail::checkerboard_sign(f.grid, i));
  }
  return out;
}

/// (c(k) + conj(c(-k))) / 2: the spectrum of the real part of the field.
template <typename Scalar>
BasicSpectralField<Scalar> hermitian_part(const BasicSpectralField<Scalar>& F) {
  BasicSpectralField<Scalar> out(F.grid);
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    out.coeffs[i] = Scalar(0.5) * (F.coeffs[i] + std::conj(F.coeffs[F.grid.mirror(i)]));
  }
  return out;
}

/// Largest Hermitian defect |c(k) - conj(c(-k))| relative to max |c|.
template <typename Scalar>
double hermitian_defect(const BasicSpectralField<Scalar>& F) {
  double scale = 0.0;
  double defect = 0.0;
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    scale = std::max(scale, static_cast<double>(std::abs(F.coeffs[i])));
    const auto partner = std::conj(F.coeffs[F.grid.mirror(i)]);
    defect = std::max(defect, static_cast<double>(std::abs(F.coeffs[i] - partner)));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

struct InverseReport {
  /// max |Im f_j| relative to max |F|.
  double imaginary_residue = 0.0;
};

/// Inverse of forward. Throws ConsistencyError when the field is not
/// Hermitian to 1e-8 (relative to its largest coefficient).
template <typename Scalar>
BasicGridFunction<Scalar> inverse(const BasicSpectralField<Scalar>& F,
                                  InverseReport* report = nullptr) {
  const double defect = hermitian_defect(F);
  if (defect > 1e-8) {
    throw ConsistencyError("inverse: spectral field is not Hermitian (relative defect " +
                           std::to_string(defect) + ")");
  }
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> work = F.coeffs;
  for (Eigen::Index i = 0; i < work.size(); ++i) {
    work[i] *= static_cast<Scalar>(detail::checkerboard_sign(F.grid, i));
  }
  detail::fft_all_axes<Scalar>(F.grid, work, true);
  const Scalar scale = static_cast<Scalar>(1.0 / F.grid.cell_volume());
  BasicGridFunction<Scalar> out(F.grid);
  double residue = 0.0;
  double coeff_scale = 0.0;
  for (Eigen::Index i = 0; i < work.size(); ++i) {
    out.values[i] = scale * work[i].real();
    residue = std::max(residue, static_cast<double>(std::abs(scale * work[i].imag())));
    coeff_scale = std::max(coeff_scale, static_cast<double>(std::abs(F.coeffs[i])));
  }
  if (report) report->imaginary_residue = coeff_scale > 0.0 ? residue / coeff_scale : 0.0;
  return out;
}

namespace detail {

inline std::string describe_frequency(const Frequency& xi) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index a = 0; a < xi.size(); ++a) os << (a ? ", " : "") << xi[a];
  os << ")";
  return os.str();
}

}  // namespace detail

/// coeff'(k) = m(xi_k) coeff(k) for a real multiplier m(const Frequency&).
template <typename Scalar, typename M>
BasicSpectralField<Scalar> apply_multiplier(const BasicSpectralField<Scalar>& F, const M& m) {
  BasicSpectralField<Scalar> out(F.grid);
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    const Frequency xi = F.grid.frequency(i);
    const double value = m(xi);
    if (std::isnan(value)) {
      throw PropagationError("apply_multiplier: NaN at xi = " + detail::describe_frequency(xi));
    }
    out.coeffs[i] = F.coeffs[i] * static_cast<Scalar>(value);
  }
  return out;
}

/// Radial multiplier g(|xi|^2), evaluated once per distinct lattice shell.
template <typename Scalar, typename G>
BasicSpectralField<Scalar> apply_radial_multiplier(const BasicSpectralField<Scalar>& F,
                                                   const G& g) {
  const BoxGrid& grid = F.grid;
  const double step2 = grid.frequency_step() * grid.frequency_step();
  std::vector<long long> shells(F.coeffs.size());
  long long max_shell = 0;
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    shells[i] = grid.wavenumber_norm2(i);
    max_shell = std::max(max_shell, shells[i]);
  }
  std::vector<double> table(max_shell + 1, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> seen(max_shell + 1, 0);
  for (long long s : shells) seen[s] = 1;
  for (long long s = 0; s <= max_shell; ++s) {
    if (!seen[s]) continue;
    table[s] = g(step2 * static_cast<double>(s));
    if (std::isnan(table[s])) {
      throw PropagationError("apply_radial_multiplier: NaN at |xi|^2 = " +
                             std::to_string(step2 * static_cast<double>(s)));
    }
  }
  BasicSpectralField<Scalar> out(grid);
  for (Eigen::Index i = 0; i < F.coeffs.size(); ++i) {
    out.coeffs[i] = F.coeffs[i] * static_cast<Scalar>(table[shells[i]]);
  }
  return out;
}

/// 2/3 rule: zero every mode with |k_d| > N_d / 3 on some axis.
template <typename Scalar>
BasicSpectralField<Scalar> dealias(const BasicSpectralField<Scalar>& F) {
  BasicSpectralField<Scalar> out = F;
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    const auto idx = F.grid.unflatten(i);
    for (int a = 0; a < F.grid.dim(); ++a) {
      if (3 * std::abs(F.grid.wavenumber(a, idx[a])) > F.grid.size(a)) {
        out.coeffs[i] = 0;
        break;
      }
    }
  }
  return out;
}

/// (-Delta)^(s/2). The zero mode is mapped to 0; for s < 0 the flag reports
/// that a nonzero mean was discarded (the result is defined modulo
/// polynomials only).
template <typename Scalar>
BasicSpectralField<Scalar> apply_sobolev(const BasicSpectralField<Scalar>& F, double s,
                                         bool* modulo_polynomials = nullptr) {
  if (modulo_polynomials) *modulo_polynomials = s < 0.0 && std::abs(F.coeffs[0]) != Scalar(0);
  if (s == 0.0) return F;
  return apply_radial_multiplier(F, [s](double xi2) {
    return xi2 == 0.0 ? 0.0 : std::pow(xi2, 0.5 * s);
  });
}

/// Mean value (zero mode divided by the box volume).
template <typename Scalar>
double mean(const BasicGridFunction<Scalar>& f) {
  return static_cast<double>(f.values.mean());
}

/// Discrete L^p Riemann norm (h^n sum |f|^p)^(1/p); p = inf for the sup norm.
template <typename Scalar>
double lp_norm(const BasicGridFunction<Scalar>& f, double p) {
  if (std::isinf(p)) return static_cast<double>(f.values.cwiseAbs().maxCoeff());
  const double sum = static_cast<double>(f.values.cwiseAbs().array().pow(static_cast<Scalar>(p)).sum());
  return std::pow(f.grid.cell_volume() * sum, 1.0 / p);
}

}  // namespace fhw
