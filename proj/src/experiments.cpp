// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "spherclt/analytic.hpp"
#include "spherclt/clt.hpp"
#include "spherclt/ensemble.hpp"
#include "spherclt/errors.hpp"
#include "spherclt/parallel.hpp"
#include "spherclt/quadrature.hpp"
#include "spherclt/simulate.hpp"
#include "spherclt/version.hpp"

namespace spherclt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedMatrix {
  std::string filename;
  Eigen::MatrixXd matrix;
};

struct ExperimentResult {
  std::vector<TestReport> reports;
  std::vector<NamedMatrix> matrices;
  json extra = json::object();
};

std::string fmt(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string time_tag(double t) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%g", t);
  return buffer;
}

ModelParams model_params(const ExperimentConfig& cfg) {
  Eigen::VectorXd theta0 =
      Eigen::Map<const Eigen::VectorXd>(cfg.theta0.data(), cfg.n);
  return ModelParams(cfg.n, UnitVectorXd(theta0), cfg.lambda);
}

SimConfig sim_config(const ExperimentConfig& cfg,
                     Scheme scheme = Scheme::kProjectedEuler) {
  return SimConfig{model_params(cfg), cfg.dt, cfg.t_max, scheme, cfg.seed,
                   1.0};
}

Eigen::VectorXd eval_vector(const ExperimentConfig& cfg) {
  return Eigen::Map<const Eigen::VectorXd>(
      cfg.eval_times.data(), static_cast<Eigen::Index>(cfg.eval_times.size()));
}

// Orthonormal basis of the hyperplane orthogonal to u (columns 1..n-1 of the
// Householder Q of [u]).
Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  // First column of Q is +/- u; keep the rest.
  return q.rightCols(n - 1);
}

double z_score(double diff, double variance) {
  if (variance <= 0.0) {
    return std::abs(diff) <= 1e-14 ? 0.0
                                   : std::numeric_limits<double>::infinity();
  }
  return std::abs(diff) / std::sqrt(variance);
}

double wls_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w) {
  const double sw = w.sum();
  const double xbar = w.dot(x) / sw;
  const double ybar = w.dot(y) / sw;
  double sxx = 0.0, sxy = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// moments: empirical second-moment matrix vs the closed form, per eval time.

ExperimentResult run_moments(const ExperimentConfig& cfg) {
  const ModelParams params = model_params(cfg);
  const SimConfig sim = sim_config(cfg);
  const Eigen::VectorXd times = eval_vector(cfg);
  const EnsembleSample sample =
      run_sphere_ensemble(sim, cfg.K, times, cfg.threads, true);

  ExperimentResult result;
  for (Eigen::Index ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const Eigen::Index n = params.n;
    const double k = static_cast<double>(cfg.K);
    const Eigen::MatrixXd empirical = sample.outer_sum[ti] / k;

    Eigen::MatrixXd analytic(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        analytic(i, j) = second_moment(params, Eigen::VectorXd::Unit(n, i),
                                       Eigen::VectorXd::Unit(n, j), t);
      }
    }

    // Entrywise z-scores with empirical standard errors of the mean.
    double max_z = 0.0;
    const Eigen::MatrixXd& raw = sample.raw[ti];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        double fourth = 0.0;
        for (Eigen::Index col = 0; col < raw.cols(); ++col) {
          const double prod = raw(i, col) * raw(j, col);
          fourth += prod * prod;
        }
        fourth /= k;
        const double var =
            (fourth - empirical(i, j) * empirical(i, j)) / k;
        max_z = std::max(
            max_z, z_score(empirical(i, j) - analytic(i, j), var));
      }
    }
    result.reports.push_back(make_report(
        "moments-max-z@t=" + time_tag(t), max_z, 4.0, cfg.K));
    result.reports.push_back(make_report(
        "moments-trace@t=" + time_tag(t), std::abs(empirical.trace() - 1.0),
        1e-10, cfg.K, "sphere constraint: trace of second moments = 1"));

    const std::string suffix = std::to_string(ti + 1) + ".csv";
    result.matrices.push_back({"second_moment_empirical_" + suffix, empirical});
    result.matrices.push_back({"second_moment_analytic_" + suffix, analytic});
  }
  return result;
}

// ---------------------------------------------------------------------------
// clt-cov: covariance of the renormalized centered sum vs the limit law.

ExperimentResult run_clt_cov(const ExperimentConfig& cfg) {
  const ModelParams params = model_params(cfg);
  const SimConfig sim = sim_config(cfg);
  const Eigen::VectorXd times = eval_vector(cfg);
  const ZEnsemble z =
      build_z_samples(sim, cfg.K, times, cfg.threads, Centering::kAnalytic);

  ExperimentResult result;
  const double k = static_cast<double>(cfg.K);
  const Eigen::VectorXd& theta0 = params.theta0.coords();
  const Eigen::MatrixXd basis = orthogonal_complement(theta0);

  for (Eigen::Index ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const std::string tag = "@t=" + time_tag(t);
    const Eigen::MatrixXd& raw = z.stats.raw[ti];
    const Eigen::VectorXd& mean = z.centering_mean[ti];
    const Eigen::MatrixXd empirical = empirical_covariance(raw, mean);
    const Eigen::MatrixXd analytic = z_infinity_cov(params, t);

    result.reports.push_back(
        covariance_test(empirical, analytic, cfg.K, "clt-cov" + tag));

    // Variance branches along theta0 and on the orthogonal hyperplane.
    const SpectralPair branches = z_infinity_cov_eigenvalues(params, t);
    const Eigen::MatrixXd centered = raw.colwise() - mean;
    const Eigen::VectorXd along = centered.transpose() * theta0;
    const double v_along = along.squaredNorm() / k;
    const double fourth_along =
        along.array().square().square().sum() / k;
    result.reports.push_back(make_report(
        "clt-cov-branch-along" + tag,
        z_score(v_along - branches.along,
                (fourth_along - v_along * v_along) / k),
        4.0, cfg.K, "analytic=" + time_tag(branches.along)));

    double max_ortho_z = 0.0;
    double max_cross = 0.0;
    for (Eigen::Index d = 0; d < basis.cols(); ++d) {
      const Eigen::VectorXd proj = centered.transpose() * basis.col(d);
      const double v = proj.squaredNorm() / k;
      const double fourth = proj.array().square().square().sum() / k;
      max_ortho_z = std::max(
          max_ortho_z, z_score(v - branches.ortho, (fourth - v * v) / k));
      const double cross = along.dot(proj) / k;
      if (v_along > 0.0 && v > 0.0) {
        max_cross =
            std::max(max_cross, std::abs(cross) / std::sqrt(v_along * v));
      }
    }
    result.reports.push_back(make_report(
        "clt-cov-branch-ortho" + tag, max_ortho_z, 4.0, cfg.K,
        "analytic=" + time_tag(branches.ortho)));
    result.reports.push_back(make_report(
        "clt-cov-cross-correlation" + tag, max_cross, 4.0 / std::sqrt(k),
        cfg.K, "theta0 component vs orthogonal components"));

    const std::string suffix = std::to_string(ti + 1) + ".csv";
    result.matrices.push_back({"covariance_empirical_" + suffix, empirical});
    result.matrices.push_back({"covariance_analytic_" + suffix, analytic});
    if (ti + 1 == times.size()) {
      result.matrices.push_back({"covariance_empirical.csv", empirical});
      result.matrices.push_back({"covariance_analytic.csv", analytic});
    }
    result.extra["z_norm" + tag] = z.z[ti].norm();
  }
  return result;
}

// ---------------------------------------------------------------------------
// clt-gauss: Mahalanobis Gaussianity of replicated block sums.

ExperimentResult run_clt_gauss(const ExperimentConfig& cfg) {
  const ModelParams params = model_params(cfg);
  const SimConfig sim = sim_config(cfg);
  const Eigen::VectorXd times = eval_vector(cfg);
  const ZEnsemble z =
      build_z_samples(sim, cfg.K, times, cfg.threads, Centering::kAnalytic);

  ExperimentResult result;
  for (Eigen::Index ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const Eigen::MatrixXd group_z = group_z_vectors(
        z.stats.raw[ti], z.centering_mean[ti], cfg.groups);
    TestReport report =
        mahalanobis_chi2_test(group_z, z_infinity_cov(params, t),
                              "clt-gauss@t=" + time_tag(t));
    report.notes += (report.notes.empty() ? "" : "; ");
    report.notes += "groups=" + std::to_string(cfg.groups) +
                    " block=" + std::to_string(cfg.K / cfg.groups);
    result.reports.push_back(std::move(report));
  }
  return result;
}

// ---------------------------------------------------------------------------
// prop33: variance plateaus of the difference martingales, plus the
// closed-form cross-checks.

ExperimentResult run_prop33(const ExperimentConfig& cfg) {
  const VariancePlateauResult sim = variance_plateau_test(
      cfg.n, cfg.K, cfg.seed, cfg.threads, cfg.dt);
  const VarianceResult g0 = g0_variance_detail(cfg.n);
  const VarianceResult gp = gprime_variance_detail(cfg.n);

  ExperimentResult result;
  result.reports.push_back(sim.g0);
  result.reports.push_back(sim.gprime);
  result.reports.push_back(make_report(
      "g0-beta-closed-form-agreement", g0.discrepancy, 1e-8, cfg.K,
      "quadrature=" + fmt(g0.value) + " closed=" + fmt(g0.closed_form)));
  result.reports.push_back(make_report(
      "gprime-2f1-closed-form-agreement", gp.discrepancy, 1e-6, cfg.K,
      "quadrature=" + fmt(gp.value) + " closed=" + fmt(gp.closed_form)));
  result.extra["t_end"] = sim.t_end;
  result.extra["g0_quadrature"] = g0.value;
  result.extra["g0_closed_form"] = g0.closed_form;
  result.extra["gprime_quadrature"] = gp.value;
  result.extra["gprime_closed_form"] = gp.closed_form;
  return result;
}

// ---------------------------------------------------------------------------
// ou-mean-decay: log-linear regression of the ensemble mean norm.

ExperimentResult run_ou_mean_decay(const ExperimentConfig& cfg) {
  if (cfg.eval_times.size() < 3) {
    throw ConfigError("ou-mean-decay needs at least 3 eval times");
  }
  const ModelParams params = model_params(cfg);
  const SimConfig sim = sim_config(cfg);
  const Eigen::VectorXd times = eval_vector(cfg);
  const EnsembleSample sample =
      run_sphere_ensemble(sim, cfg.K, times, cfg.threads, true);

  const double rate = params.drift_rate();
  const double k = static_cast<double>(cfg.K);
  const Eigen::Index T = times.size();

  Eigen::VectorXd log_norm(T), weights(T);
  double max_pointwise_z = 0.0;
  for (Eigen::Index ti = 0; ti < T; ++ti) {
    const Eigen::VectorXd mean = sample.sum[ti] / k;
    log_norm[ti] = std::log(mean.norm());
    // Delta method: var(log|m|) ~ var(component)/(K |m|^2); constant factors
    // cancel in the weighted fit.
    weights[ti] = mean.squaredNorm() * k;

    const Eigen::VectorXd analytic = mean_theta(params, times[ti]);
    for (Eigen::Index i = 0; i < params.n; ++i) {
      const double var_i =
          (sample.raw[ti].row(i).array().square().sum() / k -
           mean[i] * mean[i]) /
          k;
      max_pointwise_z =
          std::max(max_pointwise_z, z_score(mean[i] - analytic[i], var_i));
    }
  }
  const double slope = -wls_slope(times, log_norm, weights);

  ExperimentResult result;
  result.reports.push_back(make_report(
      "ou-mean-decay-slope", std::abs(slope - rate) / rate, 0.05, cfg.K,
      "fitted=" + fmt(slope) + " target=" + fmt(rate)));
  result.reports.push_back(make_report("ou-mean-decay-pointwise",
                                       max_pointwise_z, 4.0, cfg.K));
  result.extra["fitted_rate"] = slope;
  result.extra["target_rate"] = rate;
  return result;
}

// ---------------------------------------------------------------------------
// ou-timechange: planar OU angle at t vs planar BM angle at alpha_t.

ExperimentResult run_ou_timechange(const ExperimentConfig& cfg) {
  const double t = cfg.eval_times.back();
  const double alpha = ou_time_change(t, cfg.lambda);
  const ModelParams ou_params = model_params(cfg);
  ExperimentConfig bm_cfg = cfg;
  bm_cfg.lambda = 0.0;
  const ModelParams bm_params = model_params(bm_cfg);

  const SimConfig ou_sim{ou_params, cfg.dt, t, Scheme::kExactOu, cfg.seed, 1.0};
  const SimConfig bm_sim{bm_params, cfg.dt, alpha, Scheme::kExactOu, cfg.seed,
                         1.0};

  std::vector<double> ou_angles(cfg.K), bm_angles(cfg.K);
  std::vector<unsigned char> ou_warn(cfg.K, 0), bm_warn(cfg.K, 0);
  parallel_for_index(cfg.K, cfg.threads, [&](std::int64_t path) {
    {
      const EuclideanPath p = simulate_ou_path(ou_sim, path);
      const AngularPath a = angular_statistics(p);
      ou_angles[path] = a.angles[a.angles.size() - 1];
      ou_warn[path] = a.wrap_warnings.empty() ? 0 : 1;
    }
    {
      const EuclideanPath p = simulate_ou_path(
          bm_sim, philox_noise(cfg.seed, streams::kTimechangeReference,
                               static_cast<std::uint64_t>(path)));
      const AngularPath a = angular_statistics(p);
      bm_angles[path] = a.angles[a.angles.size() - 1];
      bm_warn[path] = a.wrap_warnings.empty() ? 0 : 1;
    }
  });

  int warnings = 0;
  for (std::int64_t i = 0; i < cfg.K; ++i) {
    warnings += ou_warn[i] + bm_warn[i];
  }

  TestReport report =
      ks_two_sample_test(ou_angles, bm_angles, "ou-timechange-ks");
  report.notes = "alpha_t=" + fmt(alpha) +
                 " wrap_warnings=" + std::to_string(warnings);
  ExperimentResult result;
  result.reports.push_back(std::move(report));
  result.extra["alpha_t"] = alpha;
  result.extra["wrap_warnings"] = warnings;
  return result;
}

// ---------------------------------------------------------------------------
// martingale-generic: the three reference integrands.

ExperimentResult run_martingale_generic(const ExperimentConfig& cfg) {
  if (cfg.lambda != 0.0) {
    throw ConfigError("martingale-generic requires lambda = 0");
  }
  const ModelParams params = model_params(cfg);
  const Eigen::Index n = params.n;
  const double t = cfg.t_max;

  ExperimentResult result;

  {  // H = Id: the integral is the driving BM, covariance t Id.
    const Eigen::MatrixXd target =
        t * Eigen::MatrixXd::Identity(n, n);
    MartingaleCltResult mc = generic_martingale_clt(
        identity_integrand(n), n, cfg.K, t, cfg.dt, target, cfg.seed,
        cfg.threads, "martingale-identity");
    result.reports.push_back(std::move(mc.report));
  }

  {  // H = sigma(Theta_s): target int_0^t Q(s) ds by quadrature per branch.
    auto along = [&params](double s) { return q_eigenvalues(params, s).along; };
    auto ortho = [&params](double s) { return q_eigenvalues(params, s).ortho; };
    const double along_int = integrate(along, 0.0, t, 1e-11).value;
    const double ortho_int = integrate(ortho, 0.0, t, 1e-11).value;
    const Eigen::VectorXd& th0 = params.theta0.coords();
    Eigen::MatrixXd target = ortho_int * Eigen::MatrixXd::Identity(n, n);
    target.noalias() += (along_int - ortho_int) * (th0 * th0.transpose());
    target = ((target + target.transpose()) / 2.0).eval();

    MartingaleCltResult mc = generic_martingale_clt(
        sphere_projector_integrand(params), n, cfg.K, t, cfg.dt, target,
        cfg.seed + 1, cfg.threads, "martingale-sphere-projector");
    result.matrices.push_back({"covariance_empirical.csv", mc.empirical});
    result.matrices.push_back({"covariance_analytic.csv", mc.target});
    result.reports.push_back(std::move(mc.report));
  }

  {  // H = diag(cos((i+1)s)): covariance diag(int cos^2).
    auto f = [](int component, double s) {
      return std::cos((component + 1) * s);
    };
    Eigen::MatrixXd target = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double omega = static_cast<double>(i + 1);
      target(i, i) = t / 2.0 + std::sin(2.0 * omega * t) / (4.0 * omega);
    }
    MartingaleCltResult mc = generic_martingale_clt(
        diagonal_integrand(n, f), n, cfg.K, t, cfg.dt, target, cfg.seed + 2,
        cfg.threads, "martingale-diagonal");
    result.reports.push_back(std::move(mc.report));
  }
  return result;
}

ExperimentResult run_selfcal(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.reports = run_selfcalibration(200, cfg.seed, cfg.threads);
  return result;
}

// ---------------------------------------------------------------------------
// Output files.

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << content;
  out.flush();
  if (!out.good()) throw IoError("write failed: " + path.string());
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << fmt(m(i, j));
    }
    os << '\n';
  }
  return os.str();
}

json report_to_json(const TestReport& r) {
  json doc;
  doc["name"] = r.name;
  doc["statistic"] = r.statistic;
  doc["threshold"] = r.threshold;
  doc["passed"] = r.passed;
  doc["K"] = r.K;
  doc["notes"] = r.notes;
  return doc;
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["experiment"] = experiment_token(cfg.experiment);
  doc["n"] = cfg.n;
  doc["theta0"] = cfg.theta0;
  doc["normalize-theta0"] = cfg.normalize_theta0;
  doc["lambda"] = cfg.lambda;
  doc["K"] = cfg.K;
  doc["dt"] = cfg.dt;
  doc["t-max"] = cfg.t_max;
  doc["eval-times"] = cfg.eval_times;
  doc["seed"] = cfg.seed;
  doc["out-dir"] = cfg.out_dir;
  doc["threads"] = cfg.threads;
  doc["groups"] = cfg.groups;
  doc["dump-path"] = cfg.dump_path;
  return doc;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create out dir: " + dir.string());

  const std::string hash = config_hash(cfg);
  bool all_passed = true;
  json reports = json::array();
  for (const TestReport& r : result.reports) {
    all_passed = all_passed && r.passed;
    reports.push_back(report_to_json(r));
  }
  json report_doc;
  report_doc["config_hash"] = hash;
  report_doc["experiment"] = experiment_token(cfg.experiment);
  report_doc["seed"] = cfg.seed;
  report_doc["K"] = cfg.K;
  report_doc["passed"] = all_passed;
  report_doc["reports"] = reports;
  report_doc["extra"] = result.extra;
  write_file(dir / "report.json", report_doc.dump(2) + "\n");

  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(cfg);
  manifest["config_hash"] = hash;
  manifest["timestamp"] = iso_timestamp();
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  for (const NamedMatrix& nm : result.matrices) {
    write_file(dir / nm.filename, matrix_csv(nm.matrix));
  }

  if (!cfg.dump_path.empty()) {
    const fs::path dump(cfg.dump_path);
    if (dump.is_absolute()) {
      throw IoError("dump-path must be relative to out-dir");
    }
    std::ostringstream os;
    if (cfg.experiment == Experiment::kOuTimechange) {
      const EuclideanPath p = simulate_ou_path(
          SimConfig{model_params(cfg), cfg.dt, cfg.t_max, Scheme::kExactOu,
                    cfg.seed, 1.0},
          0);
      write_path_csv(p.times, p.states, os);
    } else {
      const SpherePath p = simulate_sphere_path(sim_config(cfg), 0);
      write_path_csv(p.times, p.states, os);
    }
    write_file(dir / dump, os.str());
  }
}

}  // namespace

std::vector<TestReport> run_selfcalibration(int reps, std::uint64_t seed,
                                            int threads) {
  if (reps < 1) throw InvalidInput("run_selfcalibration: reps must be >= 1");
  const int allowed = reps / 50;  // 2%: 4 failures out of 200
  const ModelParams params(3, normalize(Eigen::Vector3d(1.0, 0.0, 0.0)));
  const Eigen::MatrixXd sigma = z_infinity_cov(params, 1.0);
  const Eigen::MatrixXd chol =
      Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  const Eigen::Index n = sigma.rows();

  std::vector<TestReport> out;

  {  // covariance_test under its own null
    constexpr std::int64_t kDraws = 2000;
    std::vector<unsigned char> failed(reps, 0);
    parallel_for_index(reps, threads, [&](std::int64_t rep) {
      SequentialNormals rng(seed, streams::kCalibration,
                            static_cast<std::uint64_t>(rep));
      Eigen::MatrixXd samples(n, kDraws);
      Eigen::VectorXd z(n);
      for (std::int64_t k = 0; k < kDraws; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.next();
        samples.col(k) = chol * z;
      }
      const Eigen::MatrixXd cov =
          empirical_covariance(samples, Eigen::VectorXd::Zero(n));
      failed[rep] = covariance_test(cov, sigma, kDraws).passed ? 0 : 1;
    });
    int failures = 0;
    for (int i = 0; i < reps; ++i) failures += failed[i];
    out.push_back(make_report("selfcal-covariance-test", failures, allowed,
                              reps, "draws_per_rep=2000"));
  }

  {  // mahalanobis_chi2_test under its own null
    constexpr std::int64_t kDraws = 200;
    std::vector<unsigned char> failed(reps, 0);
    parallel_for_index(reps, threads, [&](std::int64_t rep) {
      SequentialNormals rng(seed, streams::kCalibration,
                            (1ull << 20) + static_cast<std::uint64_t>(rep));
      Eigen::MatrixXd samples(n, kDraws);
      Eigen::VectorXd z(n);
      for (std::int64_t k = 0; k < kDraws; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.next();
        samples.col(k) = chol * z;
      }
      failed[rep] = mahalanobis_chi2_test(samples, sigma).passed ? 0 : 1;
    });
    int failures = 0;
    for (int i = 0; i < reps; ++i) failures += failed[i];
    out.push_back(make_report("selfcal-mahalanobis-test", failures, allowed,
                              reps, "samples_per_rep=200"));
  }

  {  // two-sample KS under its own null
    constexpr std::int64_t kDraws = 1000;
    std::vector<unsigned char> failed(reps, 0);
    parallel_for_index(reps, threads, [&](std::int64_t rep) {
      SequentialNormals rng(seed, streams::kCalibration,
                            (1ull << 21) + static_cast<std::uint64_t>(rep));
      std::vector<double> a(kDraws), b(kDraws);
      for (auto& v : a) v = rng.next();
      for (auto& v : b) v = rng.next();
      failed[rep] =
          ks_two_sample_test(std::move(a), std::move(b)).passed ? 0 : 1;
    });
    int failures = 0;
    for (int i = 0; i < reps; ++i) failures += failed[i];
    out.push_back(make_report("selfcal-ks-two-sample", failures, allowed, reps,
                              "samples_per_side=1000"));
  }
  return out;
}

int run_experiment(const ExperimentConfig& input) {
  ExperimentConfig cfg = input;
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "spherclt: invalid configuration: " << e.what() << "\n";
    return 2;
  }

  ExperimentResult result;
  try {
    switch (cfg.experiment) {
      case Experiment::kMoments:
        result = run_moments(cfg);
        break;
      case Experiment::kCltCov:
        result = run_clt_cov(cfg);
        break;
      case Experiment::kCltGauss:
        result = run_clt_gauss(cfg);
        break;
      case Experiment::kProp33:
        result = run_prop33(cfg);
        break;
      case Experiment::kOuMeanDecay:
        result = run_ou_mean_decay(cfg);
        break;
      case Experiment::kOuTimechange:
        result = run_ou_timechange(cfg);
        break;
      case Experiment::kMartingaleGeneric:
        result = run_martingale_generic(cfg);
        break;
      case Experiment::kSelfcal:
        result = run_selfcal(cfg);
        break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "spherclt: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "spherclt: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spherclt: experiment failed: " << e.what() << "\n";
    return 4;
  }

  try {
    write_outputs(cfg, result);
  } catch (const IoError& e) {
    std::cerr << "spherclt: I/O failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "spherclt: I/O failure: " << e.what() << "\n";
    return 3;
  }

  for (const TestReport& r : result.reports) {
    std::printf("[%s] %s statistic=%.6g threshold=%.6g\n",
                r.passed ? "pass" : "FAIL", r.name.c_str(), r.statistic,
                r.threshold);
  }
  bool all_passed = true;
  for (const TestReport& r : result.reports) all_passed &= r.passed;
  return all_passed ? 0 : 1;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) {
    std::printf(
        "usage: spherclt <experiment> [flags]\n"
        "experiments: moments clt-cov clt-gauss prop33 ou-mean-decay\n"
        "             ou-timechange martingale-generic selfcal\n"
        "flags: --n --theta0 --normalize-theta0 --lambda --K --dt --t-max\n"
        "       --eval-times --t --seed --out-dir --threads --groups\n"
        "       --config <json> --dump-path <csv>\n");
    return 0;
  }
  ExperimentConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const ConfigError& e) {
    std::cerr << "spherclt: " << e.what() << "\n";
    return 2;
  }
  return run_experiment(cfg);
}

}  // namespace spherclt
