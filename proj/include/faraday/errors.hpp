#pragma once

#include <stdexcept>
#include <string>

namespace faraday {

/// Invalid user input: bad counts, parameters, config keys. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (window too short, dt not dividing T, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Base of all numerical failures. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The flattening map lost invertibility (min J at or below the floor).
class DegenerateGeometryError : public NumericalError {
 public:
  explicit DegenerateGeometryError(double min_jacobian)
      : NumericalError("flattening degenerate: min J = " + std::to_string(min_jacobian)),
        min_jacobian_(min_jacobian) {}
  double min_jacobian() const { return min_jacobian_; }

 private:
  double min_jacobian_;
};

/// A per-mode linear system is singular or too ill-conditioned to trust.
class ConditioningError : public NumericalError {
 public:
  ConditioningError(int m1, int m2, double rcond)
      : NumericalError("ill-conditioned mode system at (m1, m2) = (" + std::to_string(m1) + ", " +
                       std::to_string(m2) + "), rcond = " + std::to_string(rcond)),
        m1_(m1),
        m2_(m2) {}
  int m1() const { return m1_; }
  int m2() const { return m2_; }

 private:
  int m1_;
  int m2_;
};

/// Data violate a solvability condition (e.g. flux compatibility for the Dirichlet Stokes problem).
class SolvabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace faraday
