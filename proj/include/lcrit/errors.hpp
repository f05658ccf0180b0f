#pragma once

#include <stdexcept>
#include <string>

namespace lcrit {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at the pole s = 1 of a principal L-function.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Requested accuracy cannot be certified with the configured parameters.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |L| fell below the near-zero threshold on the unwinding path.
class NearZeroError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument unwinding exhausted its step budget.
class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Series truncation tail exceeds the permitted bound.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random-model prime cutoff too small for the requested tolerance.
class InsufficientCutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Repeated failures while collecting a stratum of deterministic samples.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lcrit
