// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// The real-argument special functions the limit variances need: log-Gamma
// (Lanczos), Gamma/Beta continued to negative non-integer arguments via the
// reflection formula with explicit sign bookkeeping, the Gauss
// hypergeometric series 2F1, and the regularized lower incomplete gamma
// (chi-square CDF). Scope is deliberately narrow; this is not a general
// special-function library.

#ifndef SPHERCLT_SPECIAL_HPP
#define SPHERCLT_SPECIAL_HPP

namespace spherclt {

// log|Gamma(x)| together with the sign of Gamma(x).
struct SignedLogGamma {
  double log_abs;
  int sign;  // +1 or -1
};

// Valid for any real x that is not a pole (0, -1, -2, ...).
SignedLogGamma signed_log_gamma(double x);

// log Gamma(x) for x > 0.
double log_gamma(double x);

// Gamma(x) with sign, for non-pole x; overflows to +/-inf for large x.
double gamma_value(double x);

// Beta(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), analytically continued: defined
// whenever none of a, b, a+b is a non-positive integer.
double beta_continued(double a, double b);

// Gauss hypergeometric 2F1(a, b; c; z) for real arguments, |z| < 1 plus the
// convergent boundary points needed here (z = -1 with c - a - b > 0).
// A Pfaff transformation z -> z/(z-1) is applied when z < -0.5 so the series
// argument stays in [0, 1/2) and converges geometrically.
double gauss_2f1(double a, double b, double c, double z);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// CDF of the chi-square distribution with df degrees of freedom.
double chi_squared_cdf(double df, double x);

}  // namespace spherclt

#endif  // SPHERCLT_SPECIAL_HPP
