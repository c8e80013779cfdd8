#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fhw/grid.hpp"
#include "fhw/trajectory.hpp"

namespace fhw {

/// How the sup over balls is discretized.
enum class BallFamilyKind {
  Auto,        ///< Exhaustive when every axis has at most 32 points, else Dyadic
  Exhaustive,  ///< every center, every distinct ball radius in [2h, R]
  Dyadic       ///< strided centers, radii h 2^m (m >= 1) and R
};

/// Discretization controls shared by all norm estimators.
struct SpaceParams {
  double p = 2.0;
  double q = 2.0;
  double mu = 0.0;
  double s = 0.0;
  /// Littlewood-Paley block range; defaults cover the whole lattice.
  std::optional<int> j_min;
  std::optional<int> j_max;
  /// Center stride of the dyadic family; 0 selects 1 for n = 1 and 2 otherwise.
  int center_stride = 0;
  BallFamilyKind family = BallFamilyKind::Auto;
};

/// Value of one ball family member.
struct BallWitness {
  double radius = 0.0;
  Eigen::Index center = 0;
  double value = 0.0;
};

struct BlockValue {
  int j = 0;
  double value = 0.0;
};

struct NormReport {
  std::string kind;
  double value = 0.0;
  double p = 0.0;
  double q = 0.0;
  double mu = 0.0;
  double s = 0.0;
  /// Summability index of the block sequence (inf for the sup).
  double r = std::numeric_limits<double>::infinity();
  /// Best center per radius (Morrey) or per block maximizer (Besov-Morrey).
  std::vector<BallWitness> witnesses;
  /// 2^(js) ||phi_j * u||_{q,mu} per block.
  std::vector<BlockValue> blocks;
  double best_radius = 0.0;
  Eigen::Index best_center = 0;
  int best_j = 0;
  /// Family actually used.
  bool exhaustive = false;
  int center_stride = 1;
  int radius_count = 0;
  /// Mean removed before a Besov-Morrey estimate.
  double mean = 0.0;
  std::vector<std::string> warnings;
};

/// Closed periodic balls: |x - x0| <= r with the minimum-image distance.
/// For the exhaustive family, sup over open balls of every radius r >= 2h
/// equals the max over closed balls whose radius is an attained distance.
double ball_radius_limit(const BoxGrid& grid);

/// sup_{x0, r} r^(-mu/p) (h^n sum_{|x - x0| <= r} |f|^p)^(1/p).
NormReport morrey_norm(const GridFunction& f, double p, double mu, const SpaceParams& params = {});

/// Same quantity by direct enumeration of every center and every attained
/// radius (no sorting or cumulative sums). Quadratic in the grid size times
/// the radius count; intended for grids with at most a few thousand points.
NormReport morrey_norm_brute_force(const GridFunction& f, double p, double mu);

/// ||(-Delta)^(s/2) f||_{p,mu}. Throws ModuloPolynomialsError when s < 0 and
/// f has nonzero mean.
NormReport sobolev_morrey_norm(const GridFunction& f, double s, double p, double mu,
                               const SpaceParams& params = {});

/// Smooth dyadic partition of unity sampled on a grid's lattice.
class LPPartition {
 public:
  /// Blocks j_min..j_max; defaults cover every nonzero lattice frequency.
  explicit LPPartition(const BoxGrid& grid, std::optional<int> j_min = std::nullopt,
                       std::optional<int> j_max = std::nullopt);

  /// psi(t) = exp(-1 / ((t - 1/2)(2 - t))) on (1/2, 2), zero elsewhere.
  static double psi(double t);
  /// phi(2^-j |xi|) normalized by the sum over all integer scales.
  static double profile(int j, double xi_abs);

  const BoxGrid& grid() const { return grid_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  /// Mask of block j per flat lattice index.
  const Eigen::VectorXd& mask(int j) const;
  /// max over nonzero lattice frequencies inside the covered annuli of
  /// |sum_j mask_j - 1|.
  double partition_residue() const;
  /// True when every nonzero lattice frequency is fully covered.
  bool covers_lattice() const;

 private:
  BoxGrid grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  std::vector<Eigen::VectorXd> masks_;
};

/// phi_j * f.
GridFunction lp_block(const GridFunction& f, int j, const LPPartition& partition);

/// sup_j (r = inf) or l^r sum of 2^(js) ||phi_j * f||_{q,mu}, on the mean-free
/// part of f (the mean is reported).
NormReport besov_morrey_norm(const GridFunction& f, double s, double q, double mu, double r,
                             const SpaceParams& params = {},
                             const LPPartition* partition = nullptr);

struct HolderCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double p3 = 0.0;
  double mu3 = 0.0;
  bool pass = false;
};

/// ||f g||_{p3,mu3} <= ||f||_{p1,mu1} ||g||_{p2,mu2} with
/// 1/p3 = 1/p1 + 1/p2 and mu3/p3 = mu1/p1 + mu2/p2, on one ball family.
HolderCheck check_holder(const GridFunction& f, const GridFunction& g, double p1, double mu1,
                         double p2, double mu2, const SpaceParams& params = {});

/// sup_t ||u(t)||_{N^sigma_{p,mu,inf}} + sup_t t^eta ||u(t)||_{M_{q,mu}} over
/// the nodes with t > 0.
double xqp_norm(const Trajectory& traj, double p, double q, double mu, double eta, double sigma,
                const SpaceParams& params = {});

}  // namespace fhw
