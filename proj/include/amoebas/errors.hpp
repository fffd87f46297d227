#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace amoebas {

/// Bad argument or violated precondition (maps to CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the algebraic torus, e.g. a zero coordinate hit by a negative exponent.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// Requested exponent lies outside the caller-supplied truncation box.
class TruncationError : public InputError {
 public:
  using InputError::InputError;
};

/// Mean energy outside the closed convex hull of the spectrum.
class AdmissibilityError : public InputError {
 public:
  using InputError::InputError;
};

/// No admissible occupation collection exists for (N, E).
class EmptyEnsembleError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure (maps to CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0,
                          std::vector<double> trace = {})
      : std::runtime_error(what), residual_(residual), trace_(std::move(trace)) {}

  /// Best residual reached before giving up.
  double residual() const noexcept { return residual_; }
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  double residual_;
  std::vector<double> trace_;
};

/// Fiber polynomial vanished identically.
class DegenerateFiberError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Root counts differ between sampled fibers: the point is on or too close to the amoeba.
class NearAmoebaError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Gradient of the hypersurface vanishes.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Solver iterate escaped to infinity: mean energy sits on the hull boundary.
class BoundaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace amoebas
