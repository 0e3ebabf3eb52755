// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Discretized trajectories: Brownian motion on S_{n-1} (with or without
// mean reversion) and the Euclidean Ornstein-Uhlenbeck process, plus the
// angular-lift utilities used by the planar time-change experiment.

#ifndef SPHERCLT_SIMULATE_HPP
#define SPHERCLT_SIMULATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "spherclt/analytic.hpp"
#include "spherclt/geometry.hpp"
#include "spherclt/rng.hpp"

namespace spherclt {

enum class Scheme {
  kProjectedEuler,  // Euler increment, then renormalize to the sphere
  kTangentEuler,    // geodesic (exponential-map) step of the tangent increment
  kEulerMaruyama,   // Euclidean OU, plain Euler
  kExactOu,         // Euclidean OU, exact transition factors e^{-lambda dt}
};

const char* scheme_name(Scheme scheme);

struct SimConfig {
  ModelParams params;
  double dt = 1e-3;
  double t_max = 1.0;
  Scheme scheme = Scheme::kProjectedEuler;
  std::uint64_t seed = 0;
  double z0_radius = 1.0;  // |Z_0| for Euclidean OU paths

  void validate() const;
};

// Fixed-step grid; the final step may be shorter so the path always ends
// exactly at t_max.
struct StepGrid {
  std::int64_t steps;
  double dt;
  double t_max;

  double step_length(std::int64_t j) const {
    return j + 1 < steps ? dt : t_max - dt * static_cast<double>(steps - 1);
  }
  double time_after(std::int64_t j) const {
    return j + 1 < steps ? dt * static_cast<double>(j + 1) : t_max;
  }
};

StepGrid make_grid(const SimConfig& cfg);

struct SpherePath {
  Eigen::VectorXd times;   // length steps+1, starting at 0
  Eigen::MatrixXd states;  // n x (steps+1), every column unit norm
  SimConfig config;

  UnitVectorXd state_at(Eigen::Index k) const {
    return UnitVectorXd(states.col(k));
  }
};

struct EuclideanPath {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;  // n x (steps+1)
  SimConfig config;
};

// One step of the sphere scheme. `noise` must already carry the sqrt(dt)
// scaling (and any speed factor). Projected Euler adds the increment
// sigma(x) noise - drift_rate x dt and renormalizes; the tangent scheme
// moves along the geodesic of the tangent part of the same increment.
// Note the renormalization removes any purely radial drift, so drift_rate
// influences the projected scheme only through the relative weight of the
// tangent noise.
UnitVectorXd step_sphere(const UnitVectorXd& state, double dt,
                         const Eigen::VectorXd& noise, double drift_rate,
                         Scheme scheme = Scheme::kProjectedEuler);

// Per-step standard-normal supplier; fills its argument for the given step
// index. Lets tests inject rotated or degenerate noise.
using NoiseFn = std::function<void(std::int64_t step, std::span<double> out)>;

NoiseFn philox_noise(std::uint64_t seed, std::uint32_t stream,
                     std::uint64_t path_index);

// Sphere diffusion with mean decay rate r = (n-1)/2 + lambda. For lambda > 0
// this is unit-rate sphere Brownian motion run at clock rate
// c = 2r/(n-1) = (n-1+2lambda)/(n-1): the only sphere-valued diffusion whose
// mean is theta0 e^{-rt}. Realized by scaling the per-step noise by sqrt(c);
// a radial drift term alone would be cancelled by renormalization. For
// lambda = 0, c = 1 and this is plain sphere Brownian motion.
SpherePath simulate_sphere_path(const SimConfig& cfg,
                                std::uint64_t path_index = 0);
SpherePath simulate_sphere_path(const SimConfig& cfg, const NoiseFn& noise);

// Euclidean OU: Z_{k+1} = Z_k + sqrt(dt) xi - lambda Z_k dt (Euler) or
// Z_{k+1} = e^{-lambda dt} Z_k + sqrt((1 - e^{-2 lambda dt})/(2 lambda)) xi
// (exact transition). Starts at theta0 * z0_radius.
EuclideanPath simulate_ou_path(const SimConfig& cfg,
                               std::uint64_t path_index = 0);
EuclideanPath simulate_ou_path(const SimConfig& cfg, const NoiseFn& noise);

// Continuous lifted angle of a planar (n = 2) path, unwrapped across steps
// under the assumption that per-step rotations stay below pi. Steps whose
// rotation reaches pi/2 are recorded rather than silently accepted.
struct AngularPath {
  Eigen::VectorXd angles;
  std::vector<std::int64_t> wrap_warnings;
};

AngularPath angular_statistics(const EuclideanPath& path);
AngularPath angular_statistics(const SpherePath& path);

// alpha_t = (e^{2 lambda t} - 1) / (2 lambda), continuously extended to
// alpha_t = t at lambda = 0; the clock under which the planar OU angular
// part matches a planar Brownian angular part.
double ou_time_change(double t, double lambda);

// CSV dump: header "t,x1,...,xn", one row per stored step, 17 significant
// digits.
void write_path_csv(const Eigen::VectorXd& times, const Eigen::MatrixXd& states,
                    std::ostream& os);

namespace detail {

// Shared in-place stepper on raw vectors; returns false when the projected
// candidate is too short to renormalize. `scratch` must have size n.
bool sphere_step_inplace(Eigen::VectorXd& state, const Eigen::VectorXd& noise,
                         double drift_rate, double dt, Scheme scheme,
                         Eigen::VectorXd& scratch);

// Runs the sphere scheme over the grid, invoking visit(k, t_k, state) for
// k = 0..steps. NoiseProvider::fill(step, span) supplies standard normals.
template <typename NoiseProvider, typename Visitor>
void run_sphere_path(const SimConfig& cfg, const StepGrid& grid,
                     NoiseProvider&& noise, Visitor&& visit) {
  const Eigen::Index n = cfg.params.n;
  const double rate = cfg.params.drift_rate();
  const double clock_rate = 2.0 * rate / static_cast<double>(n - 1);
  Eigen::VectorXd state = cfg.params.theta0.coords();
  Eigen::VectorXd xi(n);
  Eigen::VectorXd scratch(n);
  visit(std::int64_t{0}, 0.0, state);
  for (std::int64_t j = 0; j < grid.steps; ++j) {
    noise.fill(j, std::span<double>(xi.data(), static_cast<std::size_t>(n)));
    const double h = grid.step_length(j);
    xi *= std::sqrt(clock_rate * h);
    if (!sphere_step_inplace(state, xi, rate, h, cfg.scheme, scratch)) {
      throw StepFailure(
          "sphere step: renormalization degenerate; reduce dt");
    }
    visit(j + 1, grid.time_after(j), state);
  }
}

}  // namespace detail

}  // namespace spherclt

#endif  // SPHERCLT_SIMULATE_HPP
