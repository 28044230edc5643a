#pragma once

#include <stdexcept>
#include <string>

namespace lipcausal {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  SignatureViolation,
  SingularMetric,
  OnSingularSet,
  DegenerateNeighborhood,
  InconsistentSliding,
  SlidingAmbiguity,
  InterfaceIntersection,
  NotCausal,
  NotCausallyRelated,
  NotUniformlyTimelike,
  NotOriginNormalized,
  InsufficientSampling,
  NoConvergence,
};

const char* to_string(ErrorKind kind);

/// Validation errors reject the input; numerical errors mean a well-formed
/// problem could not be solved to tolerance.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lipcausal
