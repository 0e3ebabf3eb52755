// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// The central-limit experiments: the generic iid-martingale harness for
// M_t^K = K^{-1/2} sum_k int_0^t H_s^(k) dB_s^(k) (whose limit covariance is
// int_0^t E[H_s H_s^T] ds), and the variance-plateau experiment for the
// scalar difference martingales G0 and G'.

#ifndef SPHERCLT_CLT_HPP
#define SPHERCLT_CLT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "spherclt/analytic.hpp"
#include "spherclt/stat_tests.hpp"

namespace spherclt {

// A symmetric-matrix-valued process adapted to its path's driving noise.
// current() is the left-point value used for the Ito sum of the current
// step; advance() then feeds the step's Brownian increment.
class IntegrandProcess {
 public:
  virtual ~IntegrandProcess() = default;
  virtual void reset() = 0;
  virtual const Eigen::MatrixXd& current() = 0;
  virtual void advance(double dt, const Eigen::VectorXd& brownian_increment) = 0;
};

using IntegrandFactory = std::function<std::unique_ptr<IntegrandProcess>()>;

// H = Id: the integral is the driving Brownian motion itself.
IntegrandFactory identity_integrand(Eigen::Index n);

// H = sigma(Theta_s) along a sphere Brownian path driven by the same noise;
// symmetric idempotent, so E[H H^T] = E[H] = Q(s).
IntegrandFactory sphere_projector_integrand(ModelParams params);

// H = diag(f_1(s), ..., f_n(s)) deterministic.
IntegrandFactory diagonal_integrand(
    Eigen::Index n, std::function<double(int component, double s)> f);

struct MartingaleCltResult {
  TestReport report;
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd target;
};

// Simulates K independent copies of the discretized stochastic integral
// int_0^t H_s dB_s (left-point Ito sums), estimates their covariance about
// zero, and compares it to `target` (= int_0^t E[H_s H_s^T] ds, supplied
// analytically or by quadrature). Throws InvalidInput if the integrand ever
// produces an asymmetric matrix.
MartingaleCltResult generic_martingale_clt(const IntegrandFactory& factory,
                                           Eigen::Index n, std::int64_t K,
                                           double t, double dt,
                                           const Eigen::MatrixXd& target,
                                           std::uint64_t seed, int threads,
                                           std::string name);

struct VariancePlateauResult {
  TestReport g0;
  TestReport gprime;
  double t_end;                 // plateau horizon (tail < 1% of the total)
  double g0_analytic;           // quadrature values
  double gprime_analytic;
  double g0_empirical;
  double gprime_empirical;
};

// Simulates the scalar Gaussian martingales
//   G0_t = int_0^t (sqrt(1 - e^{-ns}) - 1) e^{(n-1)s/2} dbeta_s
//   G'_t = int_0^t (sqrt(1 + e^{-ns}/(n-1)) - 1) e^{(n-1)s/2} dbeta_s
// to a horizon where the variance tail is below 1%, and tests the empirical
// variances against g0_variance(n) / gprime_variance(n) within 4 standard
// errors of the variance estimator.
VariancePlateauResult variance_plateau_test(int n, std::int64_t K,
                                            std::uint64_t seed, int threads,
                                            double dt = 1e-3);

}  // namespace spherclt

#endif  // SPHERCLT_CLT_HPP
