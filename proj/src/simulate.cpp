// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "spherclt/errors.hpp"

namespace spherclt {

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProjectedEuler:
      return "projected-euler";
    case Scheme::kTangentEuler:
      return "tangent-euler";
    case Scheme::kEulerMaruyama:
      return "euler";
    case Scheme::kExactOu:
      return "exact";
  }
  return "?";
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("SimConfig: dt must be positive");
  if (!(t_max > 0.0)) throw InvalidInput("SimConfig: t_max must be positive");
  if (dt > t_max) throw InvalidInput("SimConfig: dt must not exceed t_max");
  if (t_max / dt > 1e9) {
    throw InvalidInput("SimConfig: t_max/dt exceeds the 1e9 step budget");
  }
  if (!(z0_radius > 0.0)) {
    throw InvalidInput("SimConfig: z0_radius must be positive");
  }
}

StepGrid make_grid(const SimConfig& cfg) {
  cfg.validate();
  const auto steps =
      static_cast<std::int64_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  return {steps < 1 ? 1 : steps, cfg.dt, cfg.t_max};
}

namespace detail {

bool sphere_step_inplace(Eigen::VectorXd& state, const Eigen::VectorXd& noise,
                         double drift_rate, double dt, Scheme scheme,
                         Eigen::VectorXd& scratch) {
  const double radial = state.dot(noise);
  switch (scheme) {
    case Scheme::kProjectedEuler: {
      // state (1 - r dt) + (noise - radial state)
      scratch = noise + (1.0 - drift_rate * dt - radial) * state;
      const double norm = scratch.norm();
      if (norm < 1e-8) return false;
      state = scratch / norm;
      return true;
    }
    case Scheme::kTangentEuler: {
      // Geodesic step along the tangent part of the increment; the radial
      // drift has no tangent component.
      scratch = noise - radial * state;
      const double angle = scratch.norm();
      if (angle < 1e-14) return true;
      state = std::cos(angle) * state + (std::sin(angle) / angle) * scratch;
      state /= state.norm();  // pin the invariant over long runs
      return true;
    }
    default:
      throw InvalidInput("sphere step: scheme must be projected or tangent");
  }
}

}  // namespace detail

UnitVectorXd step_sphere(const UnitVectorXd& state, double dt,
                         const Eigen::VectorXd& noise, double drift_rate,
                         Scheme scheme) {
  if (!(dt > 0.0)) throw InvalidInput("step_sphere: dt must be positive");
  if (noise.size() != state.dim()) {
    throw InvalidInput("step_sphere: noise dimension mismatch");
  }
  Eigen::VectorXd x = state.coords();
  Eigen::VectorXd scratch(state.dim());
  if (!detail::sphere_step_inplace(x, noise, drift_rate, dt, scheme, scratch)) {
    throw StepFailure("step_sphere: renormalization degenerate; reduce dt");
  }
  return UnitVectorXd(x);
}

NoiseFn philox_noise(std::uint64_t seed, std::uint32_t stream,
                     std::uint64_t path_index) {
  GaussianStream gaussians(seed, stream, path_index);
  return [gaussians](std::int64_t step, std::span<double> out) {
    gaussians.fill_normals(static_cast<std::uint64_t>(step), out);
  };
}

namespace {

struct FunctionNoise {
  const NoiseFn& fn;
  void fill(std::int64_t step, std::span<double> out) { fn(step, out); }
};

SpherePath simulate_sphere_path_impl(const SimConfig& cfg,
                                     const NoiseFn& noise) {
  const StepGrid grid = make_grid(cfg);
  SpherePath path{Eigen::VectorXd(grid.steps + 1),
                  Eigen::MatrixXd(cfg.params.n, grid.steps + 1), cfg};
  FunctionNoise provider{noise};
  detail::run_sphere_path(cfg, grid, provider,
                          [&path](std::int64_t k, double t,
                                  const Eigen::VectorXd& state) {
                            path.times[k] = t;
                            path.states.col(k) = state;
                          });
  return path;
}

}  // namespace

SpherePath simulate_sphere_path(const SimConfig& cfg,
                                std::uint64_t path_index) {
  return simulate_sphere_path_impl(
      cfg, philox_noise(cfg.seed, streams::kSpherePaths, path_index));
}

SpherePath simulate_sphere_path(const SimConfig& cfg, const NoiseFn& noise) {
  return simulate_sphere_path_impl(cfg, noise);
}

namespace {

EuclideanPath simulate_ou_path_impl(const SimConfig& cfg,
                                    const NoiseFn& noise) {
  if (cfg.scheme != Scheme::kEulerMaruyama && cfg.scheme != Scheme::kExactOu) {
    throw InvalidInput("simulate_ou_path: scheme must be euler or exact");
  }
  const StepGrid grid = make_grid(cfg);
  const Eigen::Index n = cfg.params.n;
  const double lambda = cfg.params.lambda;

  EuclideanPath path{Eigen::VectorXd(grid.steps + 1),
                     Eigen::MatrixXd(n, grid.steps + 1), cfg};

  Eigen::VectorXd z = cfg.params.theta0.coords() * cfg.z0_radius;
  Eigen::VectorXd xi(n);
  path.times[0] = 0.0;
  path.states.col(0) = z;
  for (std::int64_t j = 0; j < grid.steps; ++j) {
    noise(j, std::span<double>(xi.data(), static_cast<std::size_t>(n)));
    const double h = grid.step_length(j);
    if (cfg.scheme == Scheme::kEulerMaruyama) {
      z += std::sqrt(h) * xi - lambda * h * z;
    } else {
      const double decay = std::exp(-lambda * h);
      const double sd =
          lambda > 0.0 ? std::sqrt(-std::expm1(-2.0 * lambda * h) /
                                   (2.0 * lambda))
                       : std::sqrt(h);
      z = decay * z + sd * xi;
    }
    path.times[j + 1] = grid.time_after(j);
    path.states.col(j + 1) = z;
  }
  return path;
}

AngularPath angular_statistics_impl(const Eigen::MatrixXd& states,
                                    bool check_radius) {
  if (states.rows() != 2) {
    throw InvalidInput("angular_statistics: defined for n = 2 only");
  }
  const Eigen::Index m = states.cols();
  AngularPath result;
  result.angles.resize(m);
  if (check_radius) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (states.col(k).norm() < 1e-8) {
        throw DomainError("angular_statistics: path too close to the origin");
      }
    }
  }
  result.angles[0] = std::atan2(states(1, 0), states(0, 0));
  for (Eigen::Index k = 1; k < m; ++k) {
    const double x0 = states(0, k - 1), y0 = states(1, k - 1);
    const double x1 = states(0, k), y1 = states(1, k);
    const double delta = std::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
    if (std::abs(delta) >= 1.5707963267948966) {
      result.wrap_warnings.push_back(k);
    }
    result.angles[k] = result.angles[k - 1] + delta;
  }
  return result;
}

}  // namespace

EuclideanPath simulate_ou_path(const SimConfig& cfg, std::uint64_t path_index) {
  return simulate_ou_path_impl(
      cfg, philox_noise(cfg.seed, streams::kEuclideanPaths, path_index));
}

EuclideanPath simulate_ou_path(const SimConfig& cfg, const NoiseFn& noise) {
  return simulate_ou_path_impl(cfg, noise);
}

AngularPath angular_statistics(const EuclideanPath& path) {
  return angular_statistics_impl(path.states, /*check_radius=*/true);
}

AngularPath angular_statistics(const SpherePath& path) {
  return angular_statistics_impl(path.states, /*check_radius=*/false);
}

double ou_time_change(double t, double lambda) {
  if (!(t >= 0.0) || !(lambda >= 0.0)) {
    throw InvalidInput("ou_time_change: requires t >= 0 and lambda >= 0");
  }
  if (lambda == 0.0) return t;
  return std::expm1(2.0 * lambda * t) / (2.0 * lambda);
}

void write_path_csv(const Eigen::VectorXd& times, const Eigen::MatrixXd& states,
                    std::ostream& os) {
  os << "t";
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    os << ",x" << (i + 1);
  }
  os << "\n";
  char buffer[32];
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", times[k]);
    os << buffer;
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", states(i, k));
      os << ',' << buffer;
    }
    os << "\n";
  }
}

}  // namespace spherclt
