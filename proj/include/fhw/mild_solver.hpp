#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhw/grid.hpp"
#include "fhw/model.hpp"
#include "fhw/morrey_norms.hpp"
#include "fhw/propagator.hpp"
#include "fhw/trajectory.hpp"

namespace fhw {

/// Iteration record of picard_solve.
struct PicardReport {
  int iterate_count = 0;
  /// Trajectory norm of each iterate u_1, u_2, ...
  std::vector<double> norms;
  /// d_k = ||u_k - u_(k-1)|| for k >= 1 (with u_0 = 0).
  std::vector<double> differences;
  /// d_(k+1) / d_k where d_k exceeds 10 machine epsilons of the iterate norm.
  std::vector<double> ratios;
  /// ||Phi|| / ||u0||: the linear bound.
  double L_meas = 0.0;
  /// max_k ||B(u_k) - B(u_(k-1))|| / (||u_k - u_(k-1)|| (||u_k||^(rho-1) + ||u_(k-1)||^(rho-1))).
  double K_meas = 0.0;
  /// ||Phi||, the size of the linear part.
  double epsilon = 0.0;
  bool converged = false;
  std::string message;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, PicardReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const PicardReport& report() const { return report_; }

 private:
  PicardReport report_;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, int last_valid_index, Trajectory partial)
      : std::runtime_error(what), last_valid_index_(last_valid_index), partial_(std::move(partial)) {}
  int last_valid_index() const { return last_valid_index_; }
  const Trajectory& partial() const { return partial_; }

 private:
  int last_valid_index_;
  Trajectory partial_;
};

/// gamma |u|^(rho-1) u or gamma |u|^rho, pointwise. For integer rho with
/// dealiasing on, u is first passed through the 2/3 rule.
GridFunction nonlinearity_eval(const GridFunction& u, const ModelParams& model);

/// Product-integration weights of the Duhamel term on a uniform grid.
///
/// The forcing is linear between nodes and the kernel
/// K(w) = nu w^(alpha-1) E_{alpha,alpha}(-|xi|^2 w^alpha) is integrated
/// exactly against each linear piece through the antiderivatives
///   int_0^w K = nu w^alpha E_{alpha,alpha+1}(-|xi|^2 w^alpha),
///   int_0^w s K(s) ds = nu w^(alpha+1) [E_{alpha,alpha+1} - E_{alpha,alpha+2}](-|xi|^2 w^alpha).
/// With lag piece m = [m dt, (m+1) dt],
///   B_k = sum_{m<k} A_m f_(k-m) + C_m f_(k-m-1).
class DuhamelOperator {
 public:
  DuhamelOperator(const PropagatorContext& context, const TimeGrid& tgrid);

  const PropagatorContext& context() const { return context_; }
  const TimeGrid& time_grid() const { return tgrid_; }

  /// Weight on f_(k-m) / f_(k-m-1) for shell index m_shell and lag piece m.
  double weight_a(int m, int shell) const { return a_(shell_slot_[shell], m); }
  double weight_c(int m, int shell) const { return c_(shell_slot_[shell], m); }

  /// B-hat at node k from spectral forcing history f_hat[0..k].
  SpectralField evaluate(const std::vector<SpectralField>& f_hat, int k) const;

  /// Everything in B-hat at node k except A_0 f_hat[k].
  SpectralField evaluate_history(const std::vector<SpectralField>& f_hat, int k) const;
  /// Adds A_0 f into acc.
  void add_newest(SpectralField& acc, const SpectralField& f) const;

 private:
  const PropagatorContext& context_;
  TimeGrid tgrid_;
  std::vector<int> shell_slot_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd c_;
};

/// Duhamel term at node t_index of a forcing history f(u(t_k)) given on
/// uniform nodes.
GridFunction duhamel_term(const Trajectory& forcing, int t_index, const ModelParams& model);

/// Trajectory norm used by the Picard diagnostics.
using TrajectoryNorm = std::function<double(const Trajectory&)>;

struct PicardOptions {
  int max_iter = 50;
  double tol = 1e-10;
  /// Defaults to the sup over nodes of the sup norm.
  TrajectoryNorm norm;
};

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// u_1 = L_alpha(.) u0, u_k = L_alpha(.) u0 + B_alpha(u_(k-1)), iterated on
/// the whole trajectory until the relative difference drops below tol.
/// Throws NonConvergenceError when d_k grows three times in a row or turns
/// non-finite.
PicardResult picard_solve(const GridFunction& u0, const ModelParams& model, const TimeGrid& tgrid,
                          const PicardOptions& options = {});

/// Causal predictor-corrector march of the same discrete fixed point. The
/// predictor freezes the newest forcing value; each corrector re-evaluates
/// it. Throws BlowUpError when ||u||_inf exceeds blowup_threshold or turns
/// non-finite.
Trajectory march_solve(const GridFunction& u0, const ModelParams& model, const TimeGrid& tgrid,
                       int corrector_iters = 3, double blowup_threshold = 1e8);

/// Exponents and ball family of the X norm used for continuous dependence.
struct XNormSpec {
  double p = 3.0;
  double q = 3.0;
  double mu = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  SpaceParams space;
};

struct DependenceReport {
  /// ||u - u_bar||_X / ||L(u0 - u0_bar)||_X (0 for identical data).
  double ratio = 0.0;
  /// 1 / (1 - 2^rho K eps^(rho-1)); infinite when the denominator is <= 0.
  double bound = 0.0;
  double K_meas = 0.0;
  double epsilon = 0.0;
  double norm_u = 0.0;
  double norm_u_bar = 0.0;
  bool pass = false;
};

/// Measures the continuous-dependence ratio of two Picard solutions and
/// checks it against the contraction bound with measured constants.
DependenceReport continuous_dependence_check(const GridFunction& u0, const GridFunction& u0_bar,
                                             const ModelParams& model, const TimeGrid& tgrid,
                                             const XNormSpec& xnorm,
                                             const PicardOptions& options = {});

}  // namespace fhw
