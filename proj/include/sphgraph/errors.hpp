#pragma once

#include <stdexcept>
#include <string>

namespace sphgraph {

/// Caller supplied arguments that violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative or algebraic routine failed to produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares harmonic analysis on a basis that is (numerically) rank deficient.
class IllPosedAnalysis : public NumericalFailure {
 public:
  IllPosedAnalysis(const std::string& what, double condition_estimate)
      : NumericalFailure(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// The normalized equivariance error is undefined because L f vanishes.
class UndefinedNormalization : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Inverse-distance weights requested for coincident points.
class SingularWeight : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace sphgraph
