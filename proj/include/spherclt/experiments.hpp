// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reproducible experiment runner behind the `spherclt` command line: a
// resolved configuration, the named experiment suites, and the report files
// they write (report.json, covariance CSVs, manifest.json).

#ifndef SPHERCLT_EXPERIMENTS_HPP
#define SPHERCLT_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spherclt/stat_tests.hpp"

namespace spherclt {

enum class Experiment {
  kMoments,
  kCltCov,
  kCltGauss,
  kProp33,
  kOuMeanDecay,
  kOuTimechange,
  kMartingaleGeneric,
  kSelfcal,
};

const char* experiment_token(Experiment e);
std::optional<Experiment> experiment_from_token(const std::string& token);

struct ExperimentConfig {
  Experiment experiment = Experiment::kMoments;
  int n = 3;
  std::vector<double> theta0;  // empty = token "e1"
  bool normalize_theta0 = false;
  double lambda = 0.0;
  std::int64_t K = 20000;
  double dt = 1e-3;
  double t_max = 1.0;
  std::vector<double> eval_times;  // empty = {t_max}
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // 0 = auto
  int groups = 200;
  std::string dump_path;  // optional: CSV dump of path 0
};

// Raised on malformed flags / config files; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Command-line flags override config-file values override defaults. The
// first element of args is the experiment token. A `--config <file>` flag
// loads a flat key-value JSON document first.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// Validates cross-field constraints and resolves theta0 (token "e1" or an
// explicit vector, normalized only when normalize_theta0 is set).
void validate_config(ExperimentConfig& cfg);

// Hash of the science-relevant resolved configuration (excludes out_dir and
// threads so reports are identical across thread counts).
std::string config_hash(const ExperimentConfig& cfg);

// Runs the experiment and writes report.json / manifest.json / CSV matrices
// under cfg.out_dir. Exit codes: 0 all tests passed, 1 test failures,
// 2 invalid configuration, 3 I/O failure.
int run_experiment(const ExperimentConfig& cfg);

// The calibration harness behind the `selfcal` experiment: every test, fed
// synthetic data from its own null `reps` times, must pass at least
// reps - floor(0.02 reps) times.
std::vector<TestReport> run_selfcalibration(int reps, std::uint64_t seed,
                                            int threads);

// Entry point used by the spherclt binary.
int cli_main(int argc, const char* const* argv);

}  // namespace spherclt

#endif  // SPHERCLT_EXPERIMENTS_HPP
