// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <utility>

#include "spherclt/errors.hpp"
#include "spherclt/special.hpp"

namespace spherclt {

namespace {

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", x);
  return buffer;
}

}  // namespace

TestReport make_report(std::string name, double statistic, double threshold,
                       std::int64_t K, std::string notes) {
  TestReport report;
  report.name = std::move(name);
  report.statistic = statistic;
  report.threshold = threshold;
  report.passed = statistic <= threshold;
  report.K = K;
  report.notes = std::move(notes);
  return report;
}

TestReport covariance_test(const Eigen::MatrixXd& empirical,
                           const Eigen::MatrixXd& analytic, std::int64_t K,
                           std::string name, double threshold) {
  if (empirical.rows() != analytic.rows() ||
      empirical.cols() != analytic.cols() ||
      empirical.rows() != empirical.cols()) {
    throw InvalidInput("covariance_test: dimension mismatch");
  }
  if (K < 2) throw InvalidInput("covariance_test: K must be >= 2");
  const Eigen::Index n = empirical.rows();
  double max_z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double var =
          (analytic(i, i) * analytic(j, j) + analytic(i, j) * analytic(i, j)) /
          static_cast<double>(K);
      const double diff = empirical(i, j) - analytic(i, j);
      double z;
      if (var <= 0.0) {
        // Degenerate entry (e.g. t = 0 covariance): only an exact match
        // counts as evidence of agreement.
        z = std::abs(diff) <= 1e-14 ? 0.0
                                    : std::numeric_limits<double>::infinity();
      } else {
        z = std::abs(diff) / std::sqrt(var);
      }
      max_z = std::max(max_z, z);
    }
  }
  const double frob = (empirical - analytic).norm();
  return make_report(std::move(name), max_z, threshold, K,
                     "frobenius_distance=" + format_double(frob));
}

TestReport mahalanobis_chi2_test(const Eigen::MatrixXd& samples,
                                 const Eigen::MatrixXd& analytic,
                                 std::string name) {
  if (analytic.rows() != analytic.cols() ||
      samples.rows() != analytic.rows()) {
    throw InvalidInput("mahalanobis_chi2_test: dimension mismatch");
  }
  const Eigen::Index n = samples.rows();
  const Eigen::Index count = samples.cols();
  if (count < 2) throw InvalidInput("mahalanobis_chi2_test: need >= 2 samples");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(analytic);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("mahalanobis_chi2_test: eigensolver failed");
  }
  std::string notes;
  Eigen::MatrixXd sigma = analytic;
  if (eig.eigenvalues().minCoeff() < 1e-10) {
    sigma += 1e-12 * Eigen::MatrixXd::Identity(n, n);
    notes = "regularized=+1e-12*Id";
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "mahalanobis_chi2_test: covariance not positive definite after "
        "regularization");
  }

  std::vector<double> d2(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::VectorXd w = llt.matrixL().solve(samples.col(k));
    d2[static_cast<std::size_t>(k)] = w.squaredNorm();
  }
  const double df = static_cast<double>(n);
  const double stat = ks_statistic(
      std::move(d2), [df](double x) { return chi_squared_cdf(df, x); });
  const double threshold =
      kKolmogorov1Percent / std::sqrt(static_cast<double>(count));
  return make_report(std::move(name), stat, threshold, count, std::move(notes));
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidInput("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max({d, lo, hi});
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidInput("ks_statistic_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      // Tie: both empirical CDFs jump at this value; consume every copy on
      // both sides before comparing.
      const double v = a[i];
      while (i < a.size() && a[i] == v) ++i;
      while (j < b.size() && b[j] == v) ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

TestReport ks_two_sample_test(std::vector<double> a, std::vector<double> b,
                              std::string name) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double stat = ks_statistic_two_sample(std::move(a), std::move(b));
  const double threshold =
      kKolmogorov1Percent * std::sqrt((na + nb) / (na * nb));
  return make_report(std::move(name), stat, threshold,
                     static_cast<std::int64_t>(na + nb));
}

}  // namespace spherclt
