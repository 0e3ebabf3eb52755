// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/stat_tests.hpp"

#include <cmath>
#include <doctest.h>

#include "spherclt/analytic.hpp"
#include "spherclt/ensemble.hpp"
#include "spherclt/errors.hpp"
#include "spherclt/rng.hpp"

using namespace spherclt;

namespace {

Eigen::MatrixXd gaussian_samples(const Eigen::MatrixXd& chol, Eigen::Index K,
                                 std::uint64_t path, std::uint64_t seed = 404) {
  SequentialNormals rng(seed, streams::kCalibration, path);
  const Eigen::Index n = chol.rows();
  Eigen::MatrixXd samples(n, K);
  Eigen::VectorXd z(n);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.next();
    samples.col(k) = chol * z;
  }
  return samples;
}

Eigen::MatrixXd test_sigma() {
  const ModelParams p(3, normalize(Eigen::Vector3d(1.0, 0.0, 0.0)));
  return z_infinity_cov(p, 1.0);
}

}  // namespace

TEST_CASE("report convention: passed iff statistic <= threshold") {
  CHECK(make_report("x", 1.0, 1.0, 10).passed);
  CHECK_FALSE(make_report("x", 1.0 + 1e-12, 1.0, 10).passed);
}

TEST_CASE("covariance test: exact match scores zero") {
  const Eigen::MatrixXd sigma = test_sigma();
  const TestReport r = covariance_test(sigma, sigma, 1000);
  CHECK(r.statistic == 0.0);
  CHECK(r.passed);
  CHECK(r.notes.find("frobenius_distance") != std::string::npos);
  CHECK_THROWS_AS(
      covariance_test(sigma, Eigen::MatrixXd::Identity(2, 2), 1000),
      InvalidInput);
}

TEST_CASE("covariance test: clearly wrong analytic matrix fails") {
  const Eigen::MatrixXd sigma = test_sigma();
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const Eigen::MatrixXd samples = gaussian_samples(llt.matrixL(), 20000, 0);
  const Eigen::MatrixXd cov =
      empirical_covariance(samples, Eigen::VectorXd::Zero(3));
  CHECK(covariance_test(cov, sigma, samples.cols()).passed);
  CHECK_FALSE(covariance_test(cov, (2.0 * sigma).eval(), samples.cols())
                  .passed);
}

TEST_CASE("covariance test calibration on its own null") {
  const Eigen::MatrixXd sigma = test_sigma();
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  int passes = 0;
  const int reps = 40;
  for (int rep = 0; rep < reps; ++rep) {
    const Eigen::MatrixXd samples = gaussian_samples(llt.matrixL(), 2000, rep);
    const Eigen::MatrixXd cov =
        empirical_covariance(samples, Eigen::VectorXd::Zero(3));
    passes += covariance_test(cov, sigma, samples.cols()).passed ? 1 : 0;
  }
  CHECK(passes >= reps - 1);
}

TEST_CASE("mahalanobis: null passes, scale inflation fails") {
  const Eigen::MatrixXd sigma = test_sigma();
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const Eigen::MatrixXd null_samples = gaussian_samples(llt.matrixL(), 500, 77);
  CHECK(mahalanobis_chi2_test(null_samples, sigma).passed);

  // Samples from N(0, 2 Sigma): d^2 doubles, the KS gap is macroscopic.
  const Eigen::MatrixXd scaled_chol =
      std::sqrt(2.0) * Eigen::MatrixXd(llt.matrixL());
  const Eigen::MatrixXd inflated = gaussian_samples(scaled_chol, 5000, 78);
  const TestReport power = mahalanobis_chi2_test(inflated, sigma);
  CHECK_FALSE(power.passed);
  CHECK(power.statistic > 5.0 * power.threshold);
}

TEST_CASE("mahalanobis reduces to squared normal vs chi-square(1)") {
  Eigen::MatrixXd sigma(1, 1);
  sigma << 1.0;
  const Eigen::MatrixXd samples =
      gaussian_samples(Eigen::MatrixXd::Identity(1, 1), 2000, 79);
  CHECK(mahalanobis_chi2_test(samples, sigma).passed);
}

TEST_CASE("mahalanobis regularizes a singular covariance and records it") {
  const ModelParams p(3, normalize(Eigen::Vector3d(1.0, 0.0, 0.0)));
  const Eigen::MatrixXd singular = q_matrix(p, 0.0);  // rank n-1
  const Eigen::MatrixXd samples =
      gaussian_samples(Eigen::MatrixXd::Identity(3, 3), 200, 80);
  const TestReport r = mahalanobis_chi2_test(samples, singular);
  CHECK(r.notes.find("regularized") != std::string::npos);
}

TEST_CASE("one-sample KS statistic on a tiny hand-computed case") {
  // Samples {0.1, 0.5, 0.9} against U(0,1): D = 7/30.
  const double d = ks_statistic({0.9, 0.1, 0.5},
                                [](double x) { return x; });
  CHECK(d == doctest::Approx(7.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("two-sample KS: same law passes, shifted law fails") {
  SequentialNormals rng(505, streams::kCalibration, 99);
  std::vector<double> a(3000), b(3000), shifted(3000);
  for (auto& v : a) v = rng.next();
  for (auto& v : b) v = rng.next();
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = b[i] + 0.25;
  CHECK(ks_two_sample_test(a, b).passed);
  CHECK_FALSE(ks_two_sample_test(a, shifted).passed);
  // Exactly equal samples have zero statistic.
  CHECK(ks_statistic_two_sample(a, a) == 0.0);
  CHECK_THROWS_AS(ks_statistic_two_sample({}, {1.0}), InvalidInput);
}

TEST_CASE("two-sample KS threshold formula") {
  const TestReport r = ks_two_sample_test(std::vector<double>(100, 0.5),
                                          std::vector<double>(400, 0.5),
                                          "degenerate");
  CHECK(r.threshold ==
        doctest::Approx(1.628 * std::sqrt(500.0 / 40000.0)).epsilon(1e-12));
}
