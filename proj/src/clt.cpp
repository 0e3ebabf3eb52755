// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/clt.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "spherclt/ensemble.hpp"
#include "spherclt/errors.hpp"
#include "spherclt/parallel.hpp"
#include "spherclt/quadrature.hpp"
#include "spherclt/rng.hpp"
#include "spherclt/simulate.hpp"

namespace spherclt {

namespace {

class IdentityIntegrand final : public IntegrandProcess {
 public:
  explicit IdentityIntegrand(Eigen::Index n)
      : h_(Eigen::MatrixXd::Identity(n, n)) {}
  void reset() override {}
  const Eigen::MatrixXd& current() override { return h_; }
  void advance(double, const Eigen::VectorXd&) override {}

 private:
  Eigen::MatrixXd h_;
};

class SphereProjectorIntegrand final : public IntegrandProcess {
 public:
  explicit SphereProjectorIntegrand(ModelParams params)
      : params_(std::move(params)),
        state_(params_.theta0.coords()),
        scratch_(params_.n),
        h_(params_.n, params_.n) {}

  void reset() override { state_ = params_.theta0.coords(); }

  const Eigen::MatrixXd& current() override {
    h_ = Eigen::MatrixXd::Identity(params_.n, params_.n);
    h_.noalias() -= state_ * state_.transpose();
    return h_;
  }

  void advance(double dt, const Eigen::VectorXd& brownian_increment) override {
    // The projector path is the sphere BM driven by this same noise.
    if (!detail::sphere_step_inplace(state_, brownian_increment,
                                     params_.drift_rate(), dt,
                                     Scheme::kProjectedEuler, scratch_)) {
      throw StepFailure("sphere projector integrand: degenerate step");
    }
  }

 private:
  ModelParams params_;
  Eigen::VectorXd state_;
  Eigen::VectorXd scratch_;
  Eigen::MatrixXd h_;
};

class DiagonalIntegrand final : public IntegrandProcess {
 public:
  DiagonalIntegrand(Eigen::Index n,
                    std::function<double(int, double)> f)
      : f_(std::move(f)), h_(Eigen::MatrixXd::Zero(n, n)) {}

  void reset() override { s_ = 0.0; }

  const Eigen::MatrixXd& current() override {
    for (Eigen::Index i = 0; i < h_.rows(); ++i) {
      h_(i, i) = f_(static_cast<int>(i), s_);
    }
    return h_;
  }

  void advance(double dt, const Eigen::VectorXd&) override { s_ += dt; }

 private:
  std::function<double(int, double)> f_;
  double s_ = 0.0;
  Eigen::MatrixXd h_;
};

void require_symmetric(const Eigen::MatrixXd& h) {
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
      if (std::abs(h(i, j) - h(j, i)) > 1e-12) {
        throw InvalidInput("generic_martingale_clt: asymmetric integrand");
      }
    }
  }
}

}  // namespace

IntegrandFactory identity_integrand(Eigen::Index n) {
  return [n]() { return std::make_unique<IdentityIntegrand>(n); };
}

IntegrandFactory sphere_projector_integrand(ModelParams params) {
  return [params]() {
    return std::make_unique<SphereProjectorIntegrand>(params);
  };
}

IntegrandFactory diagonal_integrand(
    Eigen::Index n, std::function<double(int component, double s)> f) {
  return [n, f = std::move(f)]() {
    return std::make_unique<DiagonalIntegrand>(n, f);
  };
}

MartingaleCltResult generic_martingale_clt(const IntegrandFactory& factory,
                                           Eigen::Index n, std::int64_t K,
                                           double t, double dt,
                                           const Eigen::MatrixXd& target,
                                           std::uint64_t seed, int threads,
                                           std::string name) {
  if (K < 2) throw InvalidInput("generic_martingale_clt: K must be >= 2");
  if (target.rows() != n || target.cols() != n) {
    throw InvalidInput("generic_martingale_clt: target dimension mismatch");
  }
  SimConfig grid_cfg{ModelParams(n, normalize(Eigen::VectorXd::Unit(n, 0))),
                     dt, t, Scheme::kProjectedEuler, seed};
  const StepGrid grid = make_grid(grid_cfg);

  Eigen::MatrixXd integrals(n, K);
  parallel_for_index(K, threads, [&](std::int64_t k) {
    auto integrand = factory();
    integrand->reset();
    GaussianStream gaussians(seed, streams::kMartingale,
                             static_cast<std::uint64_t>(k));
    Eigen::VectorXd db(n);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (std::int64_t j = 0; j < grid.steps; ++j) {
      gaussians.fill_normals(
          static_cast<std::uint64_t>(j),
          std::span<double>(db.data(), static_cast<std::size_t>(n)));
      const double h = grid.step_length(j);
      db *= std::sqrt(h);
      const Eigen::MatrixXd& hmat = integrand->current();
      require_symmetric(hmat);
      acc.noalias() += hmat * db;
      integrand->advance(h, db);
    }
    integrals.col(k) = acc;
  });

  const Eigen::MatrixXd cov =
      empirical_covariance(integrals, Eigen::VectorXd::Zero(n));
  MartingaleCltResult result;
  result.report = covariance_test(cov, target, K, std::move(name));
  result.empirical = cov;
  result.target = target;
  return result;
}

namespace {

double variance_tail(int n, double from, bool gprime) {
  const double nn = n;
  auto integrand = [nn, gprime](double s) {
    const double e = std::exp(-nn * s);
    const double d = gprime ? std::sqrt(1.0 + e / (nn - 1.0)) - 1.0
                            : std::sqrt(1.0 - e) - 1.0;
    return std::exp((nn - 1.0) * s) * d * d;
  };
  return integrate(integrand, from,
                   std::numeric_limits<double>::infinity(), 1e-10)
      .value;
}

}  // namespace

VariancePlateauResult variance_plateau_test(int n, std::int64_t K,
                                            std::uint64_t seed, int threads,
                                            double dt) {
  if (n < 2) throw InvalidInput("variance_plateau_test: n must be >= 2");
  if (K < 2) throw InvalidInput("variance_plateau_test: K must be >= 2");

  const double total0 = g0_variance(n);
  const double totalp = gprime_variance(n);

  // Horizon where both variance tails drop below 1% of their totals.
  double t_end = 0.5;
  while (t_end < 20.0 && (variance_tail(n, t_end, false) > 0.01 * total0 ||
                          variance_tail(n, t_end, true) > 0.01 * totalp)) {
    t_end += 0.5;
  }

  const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
  std::vector<double> w0(steps), wp(steps);
  for (std::int64_t j = 0; j < steps; ++j) {
    const double s = dt * static_cast<double>(j);
    const double e = std::exp(-n * s);
    const double growth = std::exp(0.5 * (n - 1.0) * s);
    const double root_dt = std::sqrt(dt);
    w0[j] = (std::sqrt(1.0 - e) - 1.0) * growth * root_dt;
    wp[j] = (std::sqrt(1.0 + e / (n - 1.0)) - 1.0) * growth * root_dt;
  }

  Eigen::VectorXd g0_end(K), gp_end(K);
  parallel_for_index(K, threads, [&](std::int64_t k) {
    SequentialNormals beta(seed, streams::kScalarMartingaleG0,
                           static_cast<std::uint64_t>(k));
    SequentialNormals bprime(seed, streams::kScalarMartingaleGPrime,
                             static_cast<std::uint64_t>(k));
    double g0 = 0.0, gp = 0.0;
    for (std::int64_t j = 0; j < steps; ++j) {
      g0 += w0[j] * beta.next();
      gp += wp[j] * bprime.next();
    }
    g0_end[k] = g0;
    gp_end[k] = gp;
  });

  const double v0 = g0_end.squaredNorm() / static_cast<double>(K);
  const double vp = gp_end.squaredNorm() / static_cast<double>(K);
  const double se0 = total0 * std::sqrt(2.0 / static_cast<double>(K));
  const double sep = totalp * std::sqrt(2.0 / static_cast<double>(K));

  char notes[128];
  VariancePlateauResult result;
  std::snprintf(notes, sizeof(notes), "t_end=%g empirical=%.6g analytic=%.6g",
                t_end, v0, total0);
  result.g0 = make_report("g0-variance-plateau",
                          std::abs(v0 - total0) / se0, 4.0, K, notes);
  std::snprintf(notes, sizeof(notes), "t_end=%g empirical=%.6g analytic=%.6g",
                t_end, vp, totalp);
  result.gprime = make_report("gprime-variance-plateau",
                              std::abs(vp - totalp) / sep, 4.0, K, notes);
  result.t_end = t_end;
  result.g0_analytic = total0;
  result.gprime_analytic = totalp;
  result.g0_empirical = v0;
  result.gprime_empirical = vp;
  return result;
}

}  // namespace spherclt
