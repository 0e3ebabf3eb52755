// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/analytic.hpp"

#include <cmath>
#include <string>

#include "spherclt/errors.hpp"
#include "spherclt/quadrature.hpp"
#include "spherclt/special.hpp"

namespace spherclt {

namespace {

void require_nonnegative_time(double t, const char* who) {
  if (!(t >= 0.0)) {
    throw InvalidInput(std::string(who) + ": time must be nonnegative");
  }
}

void require_plain_bm(const ModelParams& p, const char* who) {
  if (p.lambda != 0.0) {
    throw InvalidInput(std::string(who) + ": defined for lambda = 0 only");
  }
}

}  // namespace

ModelParams::ModelParams(Eigen::Index n_in, UnitVectorXd theta0_in,
                         double lambda_in)
    : n(n_in), theta0(std::move(theta0_in)), lambda(lambda_in) {
  if (n < 2) {
    throw InvalidInput("ModelParams: n must be >= 2");
  }
  if (theta0.dim() != n) {
    throw InvalidInput("ModelParams: theta0 dimension must equal n");
  }
  if (!(lambda >= 0.0)) {
    throw InvalidInput("ModelParams: lambda must be >= 0");
  }
}

double second_moment(const ModelParams& p, const Eigen::VectorXd& m,
                     const Eigen::VectorXd& m2, double t) {
  require_nonnegative_time(t, "second_moment");
  require_plain_bm(p, "second_moment");
  if (m.size() != p.n || m2.size() != p.n) {
    throw InvalidInput("second_moment: dimension mismatch");
  }
  const auto& th0 = p.theta0.coords();
  const double ent = std::exp(-static_cast<double>(p.n) * t);
  return ent * m.dot(th0) * m2.dot(th0) +
         m.dot(m2) * (1.0 - ent) / static_cast<double>(p.n);
}

Eigen::VectorXd mean_theta(const ModelParams& p, double t) {
  require_nonnegative_time(t, "mean_theta");
  return p.theta0.coords() * std::exp(-p.drift_rate() * t);
}

SpectralPair q_eigenvalues(const ModelParams& p, double s) {
  require_nonnegative_time(s, "q_eigenvalues");
  require_plain_bm(p, "q_eigenvalues");
  const double n = static_cast<double>(p.n);
  const double ens = std::exp(-n * s);
  return {(1.0 - 1.0 / n) * (1.0 - ens),
          (1.0 - 1.0 / n) * (1.0 + ens / (n - 1.0))};
}

Eigen::MatrixXd q_matrix(const ModelParams& p, double s) {
  require_nonnegative_time(s, "q_matrix");
  require_plain_bm(p, "q_matrix");
  const double n = static_cast<double>(p.n);
  const double ens = std::exp(-n * s);
  const auto& th0 = p.theta0.coords();
  Eigen::MatrixXd q =
      (1.0 - (1.0 - ens) / n) * Eigen::MatrixXd::Identity(p.n, p.n);
  q.noalias() -= ens * (th0 * th0.transpose());
  q = ((q + q.transpose()) / 2.0).eval();
  return q;
}

Eigen::MatrixXd lambda_sqrt(const ModelParams& p, double s) {
  require_nonnegative_time(s, "lambda_sqrt");
  require_plain_bm(p, "lambda_sqrt");
  const double n = static_cast<double>(p.n);
  const double ens = std::exp(-n * s);
  const double root = std::sqrt(1.0 - 1.0 / n);
  const double a = root * std::sqrt(1.0 - ens);
  const double b = root * (std::sqrt(1.0 + ens / (n - 1.0)) - std::sqrt(1.0 - ens));
  Eigen::MatrixXd lam = a * Eigen::MatrixXd::Identity(p.n, p.n);
  lam.noalias() += b * projection_matrix(p.theta0);
  return lam;
}

SpectralPair z_infinity_cov_eigenvalues(const ModelParams& p, double t) {
  require_nonnegative_time(t, "z_infinity_cov");
  require_plain_bm(p, "z_infinity_cov");
  const double n = static_cast<double>(p.n);
  const double ent = std::exp(-n * t);
  const double en1t = std::exp(-(n - 1.0) * t);
  const double ortho = (1.0 - ent) / n;
  return {ortho + ent - en1t, ortho};
}

Eigen::MatrixXd z_infinity_cov(const ModelParams& p, double t) {
  const SpectralPair eig = z_infinity_cov_eigenvalues(p, t);
  const auto& th0 = p.theta0.coords();
  Eigen::MatrixXd cov = eig.ortho * Eigen::MatrixXd::Identity(p.n, p.n);
  cov.noalias() += (eig.along - eig.ortho) * (th0 * th0.transpose());
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return cov;
}

namespace {

constexpr double kVarianceQuadTol = 1e-11;

double g0_quadrature(int n) {
  const double inv_n = 1.0 / n;
  auto integrand = [inv_n](double u) {
    const double d = std::sqrt(1.0 - u) - 1.0;
    return std::pow(u, -2.0 + inv_n) * d * d * inv_n;
  };
  return integrate(integrand, 0.0, 1.0, kVarianceQuadTol).value;
}

double g0_closed(int n) {
  const double a = -1.0 + 1.0 / n;
  return (beta_continued(a, 2.0) - 2.0 * beta_continued(a, 1.5)) / n -
         1.0 / (n - 1.0);
}

double gprime_quadrature(int n) {
  const double inv_n = 1.0 / n;
  const double inv_nm1 = 1.0 / (n - 1.0);
  auto integrand = [inv_n, inv_nm1](double u) {
    const double d = std::sqrt(1.0 + u * inv_nm1) - 1.0;
    return std::pow(u, -2.0 + inv_n) * d * d * inv_n;
  };
  return integrate(integrand, 0.0, 1.0, kVarianceQuadTol).value;
}

double gprime_closed(int n) {
  const double h =
      gauss_2f1(-0.5, -1.0 + 1.0 / n, 1.0 / n, 1.0 / (1.0 - n));
  return (2.0 * h - 1.0) / (n - 1.0);
}

}  // namespace

VarianceResult g0_variance_detail(int n) {
  if (n < 2) {
    throw InvalidInput("g0_variance: n must be >= 2");
  }
  const double quad = g0_quadrature(n);
  const double closed = g0_closed(n);
  return {quad, closed, std::abs(quad - closed)};
}

double g0_variance(int n) {
  const VarianceResult r = g0_variance_detail(n);
  if (r.discrepancy > 1e-8) {
    throw ConvergenceFailure(
        "g0_variance: quadrature and Beta closed form disagree", r.value,
        r.discrepancy);
  }
  return r.value;
}

VarianceResult gprime_variance_detail(int n) {
  if (n < 2) {
    throw InvalidInput("gprime_variance: n must be >= 2");
  }
  const double quad = gprime_quadrature(n);
  const double closed = gprime_closed(n);
  return {quad, closed, std::abs(quad - closed)};
}

double gprime_variance(int n) { return gprime_variance_detail(n).value; }

}  // namespace spherclt
