// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPHERCLT_ERRORS_HPP
#define SPHERCLT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spherclt {

// Caller passed arguments violating a documented precondition
// (dimension mismatch, negative time, K too small, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input is formally valid but numerically degenerate (e.g. normalizing a
// near-zero vector).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a special function
// (pole of Gamma, non-convergent hypergeometric regime, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method ran out of budget before reaching its tolerance.
// Carries the best estimate obtained so far.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double best_estimate,
                     double error_estimate)
      : std::runtime_error(what),
        best_estimate(best_estimate),
        error_estimate(error_estimate) {}

  double best_estimate;
  double error_estimate;
};

// A single SDE step produced an unusable state (e.g. renormalization of a
// near-zero candidate); usually means dt is too large.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spherclt

#endif  // SPHERCLT_ERRORS_HPP
