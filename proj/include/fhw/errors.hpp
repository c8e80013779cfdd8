#pragma once

#include <stdexcept>
#include <string>

namespace fhw {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data inconsistent with the representation (e.g. a spectral field
/// that is supposed to be Hermitian but is not).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-side precondition was not met.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A multiplier produced a non-finite value.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A negative-order Sobolev multiplier was applied to a field with nonzero
/// mean; the result is only defined modulo polynomials.
class ModuloPolynomialsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Least-squares fit on data that cannot be log-transformed.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fhw
