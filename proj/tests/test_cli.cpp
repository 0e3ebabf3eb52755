// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/experiments.hpp"

#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <json.hpp>

using namespace spherclt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "spherclt_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("experiment tokens round-trip") {
  for (int i = 0; i < 8; ++i) {
    const Experiment e = static_cast<Experiment>(i);
    CHECK(experiment_from_token(experiment_token(e)) == e);
  }
  CHECK_FALSE(experiment_from_token("bogus").has_value());
}

TEST_CASE("parse_config: defaults, flags, and validation") {
  const ExperimentConfig cfg =
      parse_config({"clt-cov", "--n", "3", "--K", "50000", "--t", "1.0",
                    "--seed", "42"});
  CHECK(cfg.experiment == Experiment::kCltCov);
  CHECK(cfg.n == 3);
  CHECK(cfg.K == 50000);
  CHECK(cfg.seed == 42);
  CHECK(cfg.t_max == 1.0);
  REQUIRE(cfg.eval_times.size() == 1);
  CHECK(cfg.eval_times[0] == 1.0);
  // Default theta0 resolves to e1.
  REQUIRE(cfg.theta0.size() == 3);
  CHECK(cfg.theta0[0] == 1.0);
  CHECK(cfg.theta0[1] == 0.0);

  CHECK_THROWS_AS(parse_config({}), ConfigError);
  CHECK_THROWS_AS(parse_config({"nope"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"moments", "--K", "0"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"moments", "--bogus-flag", "3"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"moments", "--K", "abc"}), ConfigError);
}

TEST_CASE("parse_config: theta0 handling") {
  const ExperimentConfig e1 = parse_config({"moments", "--n", "4",
                                            "--theta0", "e1"});
  CHECK(e1.theta0 == std::vector<double>{1.0, 0.0, 0.0, 0.0});

  CHECK_THROWS_AS(parse_config({"moments", "--n", "2", "--theta0", "1,1"}),
                  ConfigError);
  const ExperimentConfig scaled = parse_config(
      {"moments", "--n", "2", "--theta0", "1,1", "--normalize-theta0"});
  CHECK(scaled.theta0[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(
      parse_config({"moments", "--n", "3", "--theta0", "1,0"}), ConfigError);
}

TEST_CASE("parse_config: threads and eval times") {
  CHECK(parse_config({"moments", "--threads", "auto"}).threads == 0);
  CHECK(parse_config({"moments", "--threads", "3"}).threads == 3);
  CHECK_THROWS_AS(parse_config({"moments", "--threads", "many"}), ConfigError);

  const ExperimentConfig cfg = parse_config(
      {"moments", "--eval-times", "0.25,0.5", "--t-max", "1.0"});
  CHECK(cfg.eval_times == std::vector<double>{0.25, 0.5});
  CHECK_THROWS_AS(
      parse_config({"moments", "--eval-times", "0.5,0.25", "--t-max", "1"}),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config({"moments", "--eval-times", "2.5", "--t-max", "1"}),
      ConfigError);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = temp_dir("config");
  const fs::path file = dir / "cfg.json";
  {
    std::ofstream out(file);
    out << R"({"K": 1000, "n": 2, "seed": 5, "dt": 0.01})";
  }
  const ExperimentConfig cfg = parse_config(
      {"moments", "--config", file.string(), "--K", "2000"});
  CHECK(cfg.K == 2000);  // flag wins
  CHECK(cfg.n == 2);     // file wins over default
  CHECK(cfg.seed == 5);
  CHECK(cfg.dt == 0.01);

  {
    std::ofstream out(file);
    out << R"({"experiment": "clt-cov"})";
  }
  CHECK_THROWS_AS(parse_config({"moments", "--config", file.string()}),
                  ConfigError);
  {
    std::ofstream out(file);
    out << R"({"unknown-key": 1})";
  }
  CHECK_THROWS_AS(parse_config({"moments", "--config", file.string()}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config({"moments", "--config", "/nonexistent.json"}),
                  ConfigError);
}

TEST_CASE("config hash covers science fields but not out_dir/threads") {
  ExperimentConfig a = parse_config({"moments"});
  ExperimentConfig b = a;
  b.out_dir = "elsewhere";
  b.threads = 7;
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig c = a;
  c.seed = 999;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("run_experiment: exit codes and report files") {
  ExperimentConfig cfg = parse_config(
      {"prop33", "--n", "2", "--K", "4000", "--seed", "3"});
  const fs::path dir = temp_dir("run");
  cfg.out_dir = (dir / "out").string();
  CHECK(run_experiment(cfg) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));

  const nlohmann::json report =
      nlohmann::json::parse(read_file(dir / "out" / "report.json"));
  CHECK(report["passed"] == true);
  CHECK(report["experiment"] == "prop33");
  CHECK(report["reports"].size() == 4);
  for (const auto& r : report["reports"]) {
    CHECK(r.contains("name"));
    CHECK(r.contains("statistic"));
    CHECK(r.contains("threshold"));
    CHECK(r.contains("passed"));
    CHECK(r.contains("K"));
  }
  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest["config_hash"] == report["config_hash"]);
  CHECK(manifest["config"]["K"] == 4000);

  // Invalid configuration: exit 2 (validation inside run_experiment).
  ExperimentConfig bad = cfg;
  bad.K = 0;
  CHECK(run_experiment(bad) == 2);
}

TEST_CASE("run_experiment: statistical failure exits 1") {
  // Individual sphere states are not Gaussian; testing them directly against
  // the Gaussian limit law must fail, demonstrating the harness has power.
  ExperimentConfig cfg = parse_config(
      {"clt-gauss", "--n", "3", "--K", "4000", "--dt", "0.002", "--t", "0.25",
       "--seed", "8", "--groups", "4000"});
  const fs::path dir = temp_dir("fail");
  cfg.out_dir = (dir / "out").string();
  CHECK(run_experiment(cfg) == 1);
}

TEST_CASE("run_experiment: reports are byte-identical across thread counts") {
  auto run_with = [](int threads, const fs::path& out) {
    ExperimentConfig cfg = parse_config(
        {"clt-cov", "--n", "3", "--K", "3000", "--dt", "0.002", "--t", "0.5",
         "--seed", "42"});
    cfg.threads = threads;
    cfg.out_dir = out.string();
    REQUIRE(run_experiment(cfg) == 0);
  };
  const fs::path dir = temp_dir("det");
  run_with(1, dir / "a");
  run_with(4, dir / "b");
  CHECK(read_file(dir / "a" / "report.json") ==
        read_file(dir / "b" / "report.json"));
  CHECK(read_file(dir / "a" / "covariance_empirical.csv") ==
        read_file(dir / "b" / "covariance_empirical.csv"));
  CHECK(read_file(dir / "a" / "covariance_analytic.csv") ==
        read_file(dir / "b" / "covariance_analytic.csv"));
}

TEST_CASE("run_experiment: path dump lands inside out_dir") {
  ExperimentConfig cfg = parse_config(
      {"moments", "--n", "2", "--K", "10", "--dt", "0.01", "--t", "0.1",
       "--seed", "1", "--dump-path", "path0.csv"});
  const fs::path dir = temp_dir("dump");
  cfg.out_dir = (dir / "out").string();
  REQUIRE(run_experiment(cfg) == 0);
  const std::string csv = read_file(dir / "out" / "path0.csv");
  CHECK(csv.rfind("t,x1,x2", 0) == 0);

  ExperimentConfig abs = cfg;
  abs.dump_path = (dir / "escape.csv").string();
  CHECK(run_experiment(abs) == 3);  // absolute dump path refused as I/O error
}

TEST_CASE("cli_main maps usage errors to exit 2") {
  const char* bad[] = {"spherclt", "unknown-exp"};
  CHECK(cli_main(2, bad) == 2);
  const char* help[] = {"spherclt", "--help"};
  CHECK(cli_main(2, help) == 0);
}

TEST_CASE("manifest config object reproduces the run") {
  ExperimentConfig cfg = parse_config(
      {"prop33", "--n", "2", "--K", "4000", "--seed", "3"});
  const fs::path dir = temp_dir("manifest");
  cfg.out_dir = (dir / "out").string();
  REQUIRE(run_experiment(cfg) == 0);

  // Feed the manifest's config object back through --config.
  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  const fs::path replay_cfg = dir / "replay.json";
  {
    std::ofstream out(replay_cfg);
    out << manifest["config"].dump();
  }
  ExperimentConfig replay =
      parse_config({"prop33", "--config", replay_cfg.string()});
  CHECK(config_hash(replay) == config_hash(cfg));

  replay.out_dir = (dir / "replay_out").string();
  REQUIRE(run_experiment(replay) == 0);
  CHECK(read_file(dir / "out" / "report.json") ==
        read_file(dir / "replay_out" / "report.json"));
}
