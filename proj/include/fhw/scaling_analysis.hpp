#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fhw/mild_solver.hpp"
#include "fhw/morrey_norms.hpp"
#include "fhw/trajectory.hpp"

namespace fhw {

/// Scaling exponents of the (n, alpha, rho, p, q, mu) configuration.
struct DerivedExponents {
  double eta = 0.0;
  double sigma = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double s_tilde = 0.0;
  /// (n - mu)/p - (n - mu)/q.
  double l = 0.0;
  /// l - sigma = 2/(rho-1) - (n-mu)/q: the smoothing order of L_alpha(t)
  /// from N^sigma to M_q, so that eta = (alpha/2) delta.
  double delta = 0.0;

  /// Computes the exponents and verifies alpha + gamma1 - eta rho = 0 and
  /// alpha + gamma2 - eta rho = -eta to 1e-12 (ConsistencyError otherwise).
  static DerivedExponents compute(int n, double alpha, double rho, double p, double q, double mu);

  double identity1(double alpha, double rho) const { return alpha + gamma1 - eta * rho; }
  double identity2(double alpha, double rho) const { return alpha + gamma2 - eta * rho + eta; }
};

struct Condition {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct ParamVerdict {
  bool admissible = false;
  DerivedExponents exponents;
  std::vector<Condition> conditions;
  /// Descriptions of the failing conditions.
  std::vector<std::string> reasons;
};

/// Checks 2/(rho-1) - 2/(alpha rho) < (n-mu)/q < 2/(alpha(rho-1)),
/// (n-mu)/p < 2/(rho-1), 1 < p <= q, 1 < rho <= q, and eta rho < 1,
/// gamma1 > -1, gamma2 > -1. Throws
/// DomainError only when n, alpha, rho or mu are outside their ranges.
ParamVerdict validate_params(int n, double alpha, double rho, double p, double q, double mu);

struct BetaIdentityReport {
  double residual1 = 0.0;
  double residual2 = 0.0;
  bool identities_hold = false;
  /// beta(1 - eta rho, alpha - 1) and beta(alpha - eta rho, gamma1 + 1) when alpha > 1.
  std::optional<double> beta1;
  std::optional<double> beta2;
  std::string note;
};

BetaIdentityReport beta_identity_check(const DerivedExponents& e, double alpha, double rho);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double expected = 0.0;
  /// |slope - expected| / |expected|.
  double relative_error = 0.0;
  double decades = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

/// Least-squares slope of log ||u(t)||_{M_{q,mu}} against log t over the
/// nodes with t > 0, the first and last `exclude` fraction removed. The
/// expected slope is -eta. Throws FitError on non-positive norms and
/// PreconditionError when the window spans fewer than min_decades.
DecayFit decay_fit(const Trajectory& traj, double q, double mu, const DerivedExponents& e,
                   const SpaceParams& space = {}, double exclude = 0.1, double min_decades = 1.5);

/// Mollified homogeneous data c (|x|^2 + eps^2)^(-1/(rho-1)).
GridFunction homogeneous_data(const BoxGrid& grid, double rho, double amplitude, double eps);

struct SelfSimilaritySetup {
  int n = 2;
  int points = 64;
  double half_length = 8.0;
  double amplitude = 0.05;
  double mollification = 0.25;
  /// Nodes with t < window_start * T are not compared.
  double window_start = 0.5;
  int corrector_iters = 3;
};

struct SelfSimilarityReport {
  double defect = 0.0;
  std::vector<double> times;
  std::vector<double> per_node;
  int first_node = 0;
};

/// Two-box comparison of u_lambda(t, x) = lambda^(2/(rho-1)) u(lambda^(2/alpha) t, lambda x):
/// box (L, T) against box (L/lambda, T/lambda^(2/alpha)) with the same node
/// counts and the same data formula. lambda must be 1 or 2.
SelfSimilarityReport self_similarity_check(const ModelParams& model, const TimeGrid& tgrid,
                                           int lambda, const SelfSimilaritySetup& setup);

/// (M x)_a = sign[a] x_perm[a]: axis reflections and coordinate swaps.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> sign;

  static SignedPermutation identity(int n);
  static SignedPermutation reflection(int n, int axis);
  static SignedPermutation swap(int n, int a, int b);
};

/// u(M x) on the grid (M must map the grid onto itself).
GridFunction compose(const GridFunction& u, const SignedPermutation& M);

enum class Parity { Even, Odd };

/// max over nodes of ||u o M -/+ u||_inf / ||u||_inf (even: minus, odd: plus).
double symmetry_check(const Trajectory& traj, const SignedPermutation& M, Parity parity);

struct AsymptoticOptions {
  XNormSpec xnorm;
  double tol = 1e-3;
  PicardOptions picard;
};

struct AsymptoticReport {
  std::vector<double> times;
  /// ||u - v||_{N^sigma} and t^eta ||u - v||_{M_q} of the nonlinear runs.
  std::vector<double> a1_besov;
  std::vector<double> a1_morrey;
  /// The same quantities for L_alpha(t)(u0 - v0).
  std::vector<double> a2_besov;
  std::vector<double> a2_morrey;
  bool a1_below = false;
  bool a2_below = false;
  /// Both families end below tol together, or neither does.
  bool consistent = false;
  /// max over nodes of the relative gap between the A1 and A2 curves.
  double max_gap = 0.0;
};

AsymptoticReport asymptotic_equivalence_check(const GridFunction& u0, const GridFunction& v0,
                                              const ModelParams& model, const TimeGrid& tgrid,
                                              const DerivedExponents& e,
                                              const AsymptoticOptions& options = {});

}  // namespace fhw
