// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form limit objects for iid Brownian motions on S_{n-1} started at
// a common point theta0:
//
//   mean:            E[Theta_t]           = theta0 e^{-((n-1)/2 + lambda) t}
//   second moments:  E[(m.Theta_t)(m'.Theta_t)]
//                    = e^{-nt} (m.theta0)(m'.theta0) + (m.m')(1-e^{-nt})/n
//   Q(s) = E[sigma(Theta_s)] and its symmetric square root
//   Lambda(s) = a(s) Id + b(s) sigma(theta0)
//   Sigma(t) = int_0^t e^{-(n-1)(t-s)} Q(s) ds, the covariance of the
//   Gaussian limit of the renormalized centered ensemble sum
//
// plus the two limit variances of the difference martingales G0 and G'
// (quadrature value cross-checked against Beta / 2F1 closed forms).

#ifndef SPHERCLT_ANALYTIC_HPP
#define SPHERCLT_ANALYTIC_HPP

#include <Eigen/Dense>

#include "spherclt/geometry.hpp"

namespace spherclt {

struct ModelParams {
  Eigen::Index n;
  UnitVectorXd theta0;
  double lambda = 0.0;  // mean reversion; 0 = plain sphere Brownian motion

  ModelParams(Eigen::Index n_in, UnitVectorXd theta0_in, double lambda_in = 0.0);

  // (n-1)/2 + lambda: decay rate of E[Theta_t].
  double drift_rate() const {
    return 0.5 * static_cast<double>(n - 1) + lambda;
  }
};

// E[(m.Theta_t)(m'.Theta_t)] for sphere BM (lambda must be 0).
double second_moment(const ModelParams& p, const Eigen::VectorXd& m,
                     const Eigen::VectorXd& m2, double t);

// E[Theta_t] = theta0 e^{-drift_rate t}; valid for any lambda >= 0.
Eigen::VectorXd mean_theta(const ModelParams& p, double t);

// Eigenvalues of Q(s): {along theta0, on the orthogonal hyperplane}.
struct SpectralPair {
  double along;
  double ortho;
};

SpectralPair q_eigenvalues(const ModelParams& p, double s);

// Q(s) = (1 - (1 - e^{-ns})/n) Id - e^{-ns} theta0 theta0^T (lambda = 0).
Eigen::MatrixXd q_matrix(const ModelParams& p, double s);

// Lambda(s) = a(s) Id + b(s) sigma(theta0) with Lambda^2 = Q(s).
// The + sign inside the first radical of b(s) is forced by Lambda^2 = Q:
//   a(s)     = sqrt(1 - 1/n) sqrt(1 - e^{-ns})
//   a + b    = sqrt(1 - 1/n) sqrt(1 + e^{-ns}/(n-1))
Eigen::MatrixXd lambda_sqrt(const ModelParams& p, double s);

// Covariance branches of the limit process at time t:
//   along theta0: (1 - e^{-nt})/n + e^{-nt} - e^{-(n-1)t}
//   orthogonal:   (1 - e^{-nt})/n
SpectralPair z_infinity_cov_eigenvalues(const ModelParams& p, double t);

// Sigma(t), assembled from the branches above. Positive semidefinite,
// nondecreasing in t in the PSD order, with limit Id/n.
Eigen::MatrixXd z_infinity_cov(const ModelParams& p, double t);

// Limit variance of G0 = int (sqrt(1 - e^{-ns}) - 1) e^{(n-1)s/2} dbeta_s,
// i.e. int_0^infty e^{(n-1)s} (sqrt(1 - e^{-ns}) - 1)^2 ds, evaluated by
// adaptive quadrature of the u = e^{-ns} substituted form
//   (1/n) int_0^1 u^{-2+1/n} (sqrt(1-u) - 1)^2 du.
// The Beta-continuation closed form
//   (1/n){B(-1+1/n, 2) - 2 B(-1+1/n, 3/2)} - 1/(n-1)
// is evaluated alongside and must agree to 1e-8 (pi - 3 at n = 2).
struct VarianceResult {
  double value;        // quadrature value (ground truth)
  double closed_form;  // Beta / 2F1 evaluation
  double discrepancy;  // |value - closed_form|
};

VarianceResult g0_variance_detail(int n);
double g0_variance(int n);

// Limit variance of G' (per orthogonal component),
//   int_0^infty e^{(n-1)s} (sqrt(1 + e^{-ns}/(n-1)) - 1)^2 ds,
// with closed form (2 2F1(-1/2, -1+1/n; 1/n; 1/(1-n)) - 1)/(n-1).
VarianceResult gprime_variance_detail(int n);
double gprime_variance(int n);

}  // namespace spherclt

#endif  // SPHERCLT_ANALYTIC_HPP
