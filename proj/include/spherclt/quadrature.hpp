// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive Gauss-Kronrod (G7, K15) quadrature with an embedded
// error estimate. Serves as the independent oracle for every closed-form
// integral in the library, so it must not share code with the closed forms
// it checks.

#ifndef SPHERCLT_QUADRATURE_HPP
#define SPHERCLT_QUADRATURE_HPP

#include <functional>
#include <limits>

namespace spherclt {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct QuadratureOptions {
  int max_intervals = 20000;
};

// Integrates f over (lo, hi) to absolute tolerance tol. hi may be +infinity,
// in which case the tail is mapped to (0, 1] by u = exp(-(s - lo)); interval
// endpoints are never evaluated, so integrable endpoint singularities are
// fine. Throws ConvergenceFailure (carrying the best estimate) if the
// interval budget is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double tol,
                           const QuadratureOptions& options = {});

}  // namespace spherclt

#endif  // SPHERCLT_QUADRATURE_HPP
