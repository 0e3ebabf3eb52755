// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Parallel path ensembles with deterministic accumulation. Paths write only
// their own slots; sums are reduced afterwards in path order, so every
// statistic is bitwise independent of the thread count.

#ifndef SPHERCLT_ENSEMBLE_HPP
#define SPHERCLT_ENSEMBLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "spherclt/simulate.hpp"

namespace spherclt {

// Sufficient statistics of K path states at the evaluation times, plus the
// retained per-path states ("raw", one n x K matrix per time) when asked.
struct EnsembleSample {
  std::int64_t K = 0;
  Eigen::VectorXd times;
  std::vector<Eigen::VectorXd> sum;        // per time: sum_k state_k
  std::vector<Eigen::MatrixXd> outer_sum;  // per time: sum_k state_k state_k^T
  std::vector<Eigen::MatrixXd> raw;        // per time: n x K; empty if dropped
  bool has_raw = false;

  // Recomputes sum/outer_sum from raw in path order and compares exactly.
  bool accumulation_consistent() const;
};

// Per-path noise factory; the default gives each path its own Philox lane.
using NoiseFactory = std::function<NoiseFn(std::uint64_t path_index)>;

NoiseFactory default_sphere_noise(std::uint64_t seed);

// Maps eval times onto the simulation grid; throws InvalidInput when a time
// is off-grid (beyond 1e-9), unsorted, or past t_max.
std::vector<std::int64_t> eval_indices(const SimConfig& cfg,
                                       const Eigen::VectorXd& eval_times);

EnsembleSample run_sphere_ensemble(const SimConfig& cfg, std::int64_t K,
                                   const Eigen::VectorXd& eval_times,
                                   int threads, bool retain_raw = true,
                                   const NoiseFactory& factory = nullptr);

enum class Centering {
  kAnalytic,   // subtract theta0 e^{-drift_rate t} (the true expectation)
  kEmpirical,  // subtract the ensemble mean (sensitivity studies)
};

// Renormalized centered ensemble sums Z_t = K^{-1/2} sum_k (state_k - mean_t)
// at each eval time, together with the underlying sufficient statistics.
struct ZEnsemble {
  EnsembleSample stats;
  std::vector<Eigen::VectorXd> centering_mean;  // per time
  std::vector<Eigen::VectorXd> z;               // per time
};

ZEnsemble build_z_samples(const SimConfig& cfg, std::int64_t K,
                          const Eigen::VectorXd& eval_times, int threads,
                          Centering centering = Centering::kAnalytic,
                          const NoiseFactory& factory = nullptr);

// Unbiased covariance (divisor K-1, empirical mean subtracted).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples);

// Covariance about a known mean (divisor K).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples,
                                     const Eigen::VectorXd& known_mean);

// Splits the K columns into `groups` consecutive blocks of equal size g and
// returns the n x groups matrix of per-block vectors g^{-1/2} sum (x - mean):
// iid replicas of the renormalized centered sum at block size g.
Eigen::MatrixXd group_z_vectors(const Eigen::MatrixXd& raw,
                                const Eigen::VectorXd& mean, int groups);

}  // namespace spherclt

#endif  // SPHERCLT_ENSEMBLE_HPP
