// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/ensemble.hpp"

#include <cmath>
#include <utility>

#include "spherclt/errors.hpp"
#include "spherclt/parallel.hpp"

namespace spherclt {

bool EnsembleSample::accumulation_consistent() const {
  if (!has_raw) return true;
  for (std::size_t ti = 0; ti < raw.size(); ++ti) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(raw[ti].rows());
    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(raw[ti].rows(), raw[ti].rows());
    for (Eigen::Index k = 0; k < raw[ti].cols(); ++k) {
      s += raw[ti].col(k);
      o.noalias() += raw[ti].col(k) * raw[ti].col(k).transpose();
    }
    if (s != sum[ti] || o != outer_sum[ti]) return false;
  }
  return true;
}

NoiseFactory default_sphere_noise(std::uint64_t seed) {
  return [seed](std::uint64_t path_index) {
    return philox_noise(seed, streams::kSpherePaths, path_index);
  };
}

std::vector<std::int64_t> eval_indices(const SimConfig& cfg,
                                       const Eigen::VectorXd& eval_times) {
  const StepGrid grid = make_grid(cfg);
  if (eval_times.size() == 0) {
    throw InvalidInput("eval_indices: need at least one eval time");
  }
  std::vector<std::int64_t> indices;
  indices.reserve(eval_times.size());
  double prev = -1.0;
  for (Eigen::Index i = 0; i < eval_times.size(); ++i) {
    const double t = eval_times[i];
    if (!(t > prev)) {
      throw InvalidInput("eval_indices: eval times must be increasing");
    }
    prev = t;
    std::int64_t idx;
    if (std::abs(t - grid.t_max) <= 1e-9) {
      idx = grid.steps;
    } else {
      idx = static_cast<std::int64_t>(std::llround(t / grid.dt));
      if (idx < 0 || idx > grid.steps ||
          std::abs(idx * grid.dt - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw InvalidInput("eval_indices: eval time off the simulation grid");
      }
    }
    indices.push_back(idx);
  }
  return indices;
}

EnsembleSample run_sphere_ensemble(const SimConfig& cfg, std::int64_t K,
                                   const Eigen::VectorXd& eval_times,
                                   int threads, bool retain_raw,
                                   const NoiseFactory& factory) {
  if (K < 2) throw InvalidInput("run_sphere_ensemble: K must be >= 2");
  const std::vector<std::int64_t> indices = eval_indices(cfg, eval_times);
  const StepGrid grid = make_grid(cfg);
  const Eigen::Index n = cfg.params.n;
  const std::size_t T = indices.size();
  const NoiseFactory noise =
      factory ? factory : default_sphere_noise(cfg.seed);

  EnsembleSample sample;
  sample.K = K;
  sample.times = eval_times;
  sample.raw.assign(T, Eigen::MatrixXd(n, K));

  parallel_for_index(K, threads, [&](std::int64_t k) {
    const NoiseFn path_noise = noise(static_cast<std::uint64_t>(k));
    struct Provider {
      const NoiseFn& fn;
      void fill(std::int64_t step, std::span<double> out) { fn(step, out); }
    } provider{path_noise};
    std::size_t next = 0;
    detail::run_sphere_path(
        cfg, grid, provider,
        [&](std::int64_t step, double, const Eigen::VectorXd& state) {
          while (next < T && indices[next] == step) {
            sample.raw[next].col(k) = state;
            ++next;
          }
        });
  });

  // Canonical reduction: path order, single thread.
  sample.sum.assign(T, Eigen::VectorXd::Zero(n));
  sample.outer_sum.assign(T, Eigen::MatrixXd::Zero(n, n));
  for (std::size_t ti = 0; ti < T; ++ti) {
    for (Eigen::Index k = 0; k < K; ++k) {
      sample.sum[ti] += sample.raw[ti].col(k);
      sample.outer_sum[ti].noalias() +=
          sample.raw[ti].col(k) * sample.raw[ti].col(k).transpose();
    }
  }
  sample.has_raw = true;
  if (!retain_raw) {
    sample.raw.clear();
    sample.has_raw = false;
  }
  return sample;
}

ZEnsemble build_z_samples(const SimConfig& cfg, std::int64_t K,
                          const Eigen::VectorXd& eval_times, int threads,
                          Centering centering, const NoiseFactory& factory) {
  ZEnsemble result;
  result.stats =
      run_sphere_ensemble(cfg, K, eval_times, threads, true, factory);
  const double sqrt_k = std::sqrt(static_cast<double>(K));
  for (Eigen::Index ti = 0; ti < eval_times.size(); ++ti) {
    Eigen::VectorXd mean =
        centering == Centering::kAnalytic
            ? mean_theta(cfg.params, eval_times[ti])
            : Eigen::VectorXd(result.stats.sum[ti] / static_cast<double>(K));
    result.z.push_back(
        (result.stats.sum[ti] - static_cast<double>(K) * mean) / sqrt_k);
    result.centering_mean.push_back(std::move(mean));
  }
  return result;
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples) {
  const Eigen::Index K = samples.cols();
  if (K < 2) throw InvalidInput("empirical_covariance: need >= 2 samples");
  const Eigen::VectorXd mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - mean;
  Eigen::MatrixXd cov =
      (centered * centered.transpose()) / static_cast<double>(K - 1);
  return ((cov + cov.transpose()) / 2.0).eval();
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples,
                                     const Eigen::VectorXd& known_mean) {
  const Eigen::Index K = samples.cols();
  if (K < 2) throw InvalidInput("empirical_covariance: need >= 2 samples");
  if (known_mean.size() != samples.rows()) {
    throw InvalidInput("empirical_covariance: mean dimension mismatch");
  }
  const Eigen::MatrixXd centered = samples.colwise() - known_mean;
  Eigen::MatrixXd cov =
      (centered * centered.transpose()) / static_cast<double>(K);
  return ((cov + cov.transpose()) / 2.0).eval();
}

Eigen::MatrixXd group_z_vectors(const Eigen::MatrixXd& raw,
                                const Eigen::VectorXd& mean, int groups) {
  const Eigen::Index K = raw.cols();
  if (groups < 2 || K % groups != 0) {
    throw InvalidInput(
        "group_z_vectors: groups must be >= 2 and divide the sample count");
  }
  const Eigen::Index g = K / groups;
  const double sqrt_g = std::sqrt(static_cast<double>(g));
  Eigen::MatrixXd z(raw.rows(), groups);
  for (int b = 0; b < groups; ++b) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(raw.rows());
    for (Eigen::Index k = b * g; k < (b + 1) * g; ++k) {
      acc += raw.col(k) - mean;
    }
    z.col(b) = acc / sqrt_g;
  }
  return z;
}

}  // namespace spherclt
