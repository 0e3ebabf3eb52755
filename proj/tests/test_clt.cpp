// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/clt.hpp"

#include <cmath>
#include <doctest.h>

#include "spherclt/errors.hpp"
#include "spherclt/quadrature.hpp"

using namespace spherclt;

namespace {

ModelParams params_e1(Eigen::Index n) {
  return ModelParams(n, normalize(Eigen::VectorXd::Unit(n, 0).eval()));
}

class AsymmetricIntegrand final : public IntegrandProcess {
 public:
  AsymmetricIntegrand() : h_(Eigen::MatrixXd::Zero(2, 2)) {
    h_(0, 1) = 1.0;  // h_(1,0) stays 0
  }
  void reset() override {}
  const Eigen::MatrixXd& current() override { return h_; }
  void advance(double, const Eigen::VectorXd&) override {}

 private:
  Eigen::MatrixXd h_;
};

}  // namespace

TEST_CASE("identity integrand reproduces Brownian covariance t Id") {
  const Eigen::Index n = 3;
  const double t = 1.0;
  const Eigen::MatrixXd target = t * Eigen::MatrixXd::Identity(n, n);
  const MartingaleCltResult r = generic_martingale_clt(
      identity_integrand(n), n, 4000, t, 2e-3, target, 1234, 0, "identity");
  CHECK(r.report.passed);
  CHECK((r.empirical - target).lpNorm<Eigen::Infinity>() <= 0.2);
}

TEST_CASE("deterministic diagonal integrand matches the isometry") {
  const Eigen::Index n = 2;
  const double t = 1.5;
  auto f = [](int component, double s) {
    return component == 0 ? std::exp(-s) : 1.0 + 0.5 * s;
  };
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, n);
  // Oracle: quadrature of f_i^2 (elementary antiderivatives exist, but the
  // quadrature keeps the oracle independent of hand algebra).
  for (Eigen::Index i = 0; i < n; ++i) {
    target(i, i) = integrate(
                       [&f, i](double s) {
                         const double v = f(static_cast<int>(i), s);
                         return v * v;
                       },
                       0.0, t, 1e-12)
                       .value;
  }
  CHECK(target(0, 0) ==
        doctest::Approx((1.0 - std::exp(-2.0 * t)) / 2.0).epsilon(1e-10));
  const MartingaleCltResult r = generic_martingale_clt(
      diagonal_integrand(n, f), n, 4000, t, 2e-3, target, 99, 0, "diag");
  CHECK(r.report.passed);
}

TEST_CASE("sphere projector integrand matches int Q(s) ds") {
  const Eigen::Index n = 3;
  const double t = 1.0;
  const ModelParams p = params_e1(n);
  const double along =
      integrate([&p](double s) { return q_eigenvalues(p, s).along; }, 0.0, t,
                1e-11)
          .value;
  const double ortho =
      integrate([&p](double s) { return q_eigenvalues(p, s).ortho; }, 0.0, t,
                1e-11)
          .value;
  const Eigen::VectorXd& th0 = p.theta0.coords();
  Eigen::MatrixXd target = ortho * Eigen::MatrixXd::Identity(n, n);
  target += (along - ortho) * (th0 * th0.transpose());

  const MartingaleCltResult r = generic_martingale_clt(
      sphere_projector_integrand(p), n, 4000, t, 2e-3, target, 7, 0, "sigma");
  CHECK(r.report.passed);
}

TEST_CASE("asymmetric integrands are rejected") {
  const IntegrandFactory factory = []() {
    return std::make_unique<AsymmetricIntegrand>();
  };
  CHECK_THROWS_AS(
      generic_martingale_clt(factory, 2, 16, 0.1, 1e-2,
                             Eigen::MatrixXd::Identity(2, 2), 1, 0, "bad"),
      InvalidInput);
}

TEST_CASE("target dimension mismatch is rejected") {
  CHECK_THROWS_AS(
      generic_martingale_clt(identity_integrand(3), 3, 16, 0.1, 1e-2,
                             Eigen::MatrixXd::Identity(2, 2), 1, 0, "bad"),
      InvalidInput);
}

TEST_CASE("variance plateau of the difference martingales") {
  const VariancePlateauResult r = variance_plateau_test(2, 8000, 2026, 0);
  CHECK(r.g0.passed);
  CHECK(r.gprime.passed);
  CHECK(r.t_end >= 1.0);
  CHECK(r.g0_analytic == doctest::Approx(3.14159265358979324 - 3.0)
                             .epsilon(1e-9));
  // The tail rule: at t_end the remaining variance mass is < 1%.
  const double tail = integrate(
                          [](double s) {
                            const double d = std::sqrt(1.0 - std::exp(-2.0 * s)) - 1.0;
                            return std::exp(s) * d * d;
                          },
                          r.t_end, std::numeric_limits<double>::infinity(),
                          1e-10)
                          .value;
  CHECK(tail <= 0.01 * r.g0_analytic);
}

TEST_CASE("analytic variance of the increasing process is nondecreasing") {
  for (int n : {2, 3}) {
    double prev = 0.0;
    for (double t = 0.25; t <= 4.0; t += 0.25) {
      const double v = integrate(
                           [n](double s) {
                             const double d =
                                 std::sqrt(1.0 - std::exp(-n * s)) - 1.0;
                             return std::exp((n - 1.0) * s) * d * d;
                           },
                           0.0, t, 1e-10)
                           .value;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}
