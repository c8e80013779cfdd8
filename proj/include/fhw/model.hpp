#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "fhw/errors.hpp"

namespace fhw {

enum class NonlinearityForm {
  Signed,   ///< gamma |u|^(rho-1) u
  Unsigned  ///< gamma |u|^rho
};

inline std::string_view to_string(NonlinearityForm form) {
  return form == NonlinearityForm::Signed ? "signed" : "unsigned";
}

/// Scalar parameters of the model u = L_alpha(t) u0 + B_alpha(u).
struct ModelParams {
  double alpha = 1.5;
  double rho = 3.0;
  /// +1, -1, or 0 (linear problem).
  int gamma_sign = 0;
  double nu = 1.0;
  NonlinearityForm form = NonlinearityForm::Signed;
  /// 2/3-rule dealiasing of u before an integer-power nonlinearity.
  bool dealias = true;

  void validate() const {
    if (!(alpha >= 1.0 && alpha < 2.0)) {
      throw DomainError("ModelParams: alpha must lie in [1, 2), got " + std::to_string(alpha));
    }
    if (!(rho > 1.0) || !std::isfinite(rho)) {
      throw DomainError("ModelParams: rho must exceed 1, got " + std::to_string(rho));
    }
    if (gamma_sign < -1 || gamma_sign > 1) {
      throw DomainError("ModelParams: gamma_sign must be -1, 0 or +1");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw DomainError("ModelParams: nu must be positive, got " + std::to_string(nu));
    }
  }

  bool integer_power() const { return rho == std::nearbyint(rho); }
};

}  // namespace fhw
