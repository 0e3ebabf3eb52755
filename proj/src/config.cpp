// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spherclt/errors.hpp"
#include "spherclt/experiments.hpp"
#include "spherclt/geometry.hpp"

namespace spherclt {

namespace {

using nlohmann::json;

constexpr const char* kTokens[] = {
    "moments",       "clt-cov",      "clt-gauss",          "prop33",
    "ou-mean-decay", "ou-timechange", "martingale-generic", "selfcal"};

std::vector<double> parse_double_list(const std::string& text,
                                      const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("malformed number in ") + what + ": '" +
                        item + "'");
    }
  }
  if (values.empty()) {
    throw ConfigError(std::string("empty list for ") + what);
  }
  return values;
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "experiment") {
        const auto exp = experiment_from_token(value.get<std::string>());
        if (!exp) throw ConfigError("unknown experiment in config file");
        cfg.experiment = *exp;
      } else if (key == "n") {
        cfg.n = value.get<int>();
      } else if (key == "theta0") {
        if (value.is_string()) {
          if (value.get<std::string>() != "e1") {
            throw ConfigError("theta0 token must be \"e1\"");
          }
          cfg.theta0.clear();
        } else {
          cfg.theta0 = value.get<std::vector<double>>();
        }
      } else if (key == "normalize-theta0") {
        cfg.normalize_theta0 = value.get<bool>();
      } else if (key == "lambda") {
        cfg.lambda = value.get<double>();
      } else if (key == "K") {
        cfg.K = value.get<std::int64_t>();
      } else if (key == "dt") {
        cfg.dt = value.get<double>();
      } else if (key == "t-max") {
        cfg.t_max = value.get<double>();
      } else if (key == "eval-times") {
        cfg.eval_times = value.get<std::vector<double>>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "out-dir") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "threads") {
        if (value.is_string()) {
          if (value.get<std::string>() != "auto") {
            throw ConfigError("threads must be an integer or \"auto\"");
          }
          cfg.threads = 0;
        } else {
          cfg.threads = value.get<int>();
        }
      } else if (key == "groups") {
        cfg.groups = value.get<int>();
      } else if (key == "dump-path") {
        cfg.dump_path = value.get<std::string>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const json::exception&) {
      throw ConfigError("bad value type for config key: " + key);
    }
  }
}

}  // namespace

const char* experiment_token(Experiment e) {
  return kTokens[static_cast<int>(e)];
}

std::optional<Experiment> experiment_from_token(const std::string& token) {
  for (int i = 0; i < 8; ++i) {
    if (token == kTokens[i]) return static_cast<Experiment>(i);
  }
  return std::nullopt;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  if (args.empty()) {
    throw ConfigError(
        "usage: spherclt <experiment> [flags]; experiments: moments, "
        "clt-cov, clt-gauss, prop33, ou-mean-decay, ou-timechange, "
        "martingale-generic, selfcal");
  }
  const auto exp = experiment_from_token(args[0]);
  if (!exp) {
    throw ConfigError("unknown experiment: '" + args[0] + "'");
  }

  ExperimentConfig cfg;
  cfg.experiment = *exp;

  // Config file first (lowest precedence after built-in defaults).
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") apply_config_file(args[i + 1], cfg);
  }
  if (!args.empty() && args.back() == "--config") {
    throw ConfigError("--config requires a file argument");
  }
  if (cfg.experiment != *exp) {
    throw ConfigError("config file experiment does not match the subcommand");
  }

  CLI::App app{"sphere ensemble experiment runner"};
  std::string theta0_text, eval_times_text, threads_text, config_file;
  double t_single = 0.0;
  bool t_single_seen = false;

  app.add_option("--config", config_file, "flat key-value JSON config file");
  app.add_option("--n", cfg.n, "ambient dimension");
  app.add_option("--theta0", theta0_text,
                 "start point: 'e1' or comma-separated coordinates");
  app.add_flag("--normalize-theta0", cfg.normalize_theta0,
               "normalize a non-unit theta0 instead of rejecting it");
  app.add_option("--lambda", cfg.lambda, "mean-reversion rate (>= 0)");
  app.add_option("--K", cfg.K, "ensemble size");
  app.add_option("--dt", cfg.dt, "step size");
  app.add_option("--t-max", cfg.t_max, "time horizon");
  app.add_option("--eval-times", eval_times_text,
                 "comma-separated evaluation times");
  app.add_option("--t", t_single, "shorthand: single eval time (sets t-max)")
      ->each([&](const std::string&) { t_single_seen = true; });
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--out-dir", cfg.out_dir, "output directory");
  app.add_option("--threads", threads_text, "worker threads or 'auto'");
  app.add_option("--groups", cfg.groups, "replicate groups (clt-gauss)");
  app.add_option("--dump-path", cfg.dump_path,
                 "write the first simulated path to this CSV file");

  std::vector<std::string> rest(args.begin() + 1, args.end());
  std::vector<const char*> argv;
  argv.push_back("spherclt");
  for (const auto& a : rest) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string(e.what()) + "\n" + app.help());
  }

  if (!theta0_text.empty()) {
    if (theta0_text == "e1") {
      cfg.theta0.clear();
    } else {
      cfg.theta0 = parse_double_list(theta0_text, "--theta0");
    }
  }
  if (!eval_times_text.empty()) {
    cfg.eval_times = parse_double_list(eval_times_text, "--eval-times");
  }
  if (t_single_seen) {
    cfg.eval_times = {t_single};
    cfg.t_max = t_single;
  }
  if (!threads_text.empty()) {
    if (threads_text == "auto") {
      cfg.threads = 0;
    } else {
      try {
        std::size_t pos = 0;
        cfg.threads = std::stoi(threads_text, &pos);
        if (pos != threads_text.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("--threads must be an integer or 'auto'");
      }
    }
  }
  validate_config(cfg);
  return cfg;
}

void validate_config(ExperimentConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n must be >= 2");
  if (cfg.K < 2) throw ConfigError("K must be >= 2");
  if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.t_max > 0.0)) throw ConfigError("t-max must be positive");
  if (cfg.dt > cfg.t_max) throw ConfigError("dt must not exceed t-max");
  if (cfg.t_max / cfg.dt > 1e9) throw ConfigError("t-max/dt exceeds 1e9");
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  if (cfg.groups < 2) throw ConfigError("groups must be >= 2");

  if (cfg.theta0.empty()) {
    cfg.theta0.assign(cfg.n, 0.0);
    cfg.theta0[0] = 1.0;
  }
  if (static_cast<int>(cfg.theta0.size()) != cfg.n) {
    throw ConfigError("theta0 dimension does not match n");
  }
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(cfg.theta0.data(), cfg.n);
  const double norm = v.norm();
  if (cfg.normalize_theta0) {
    if (norm <= 1e-300) throw ConfigError("theta0 is numerically zero");
    v /= norm;
    for (int i = 0; i < cfg.n; ++i) cfg.theta0[i] = v[i];
  } else if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw ConfigError(
        "theta0 is not a unit vector (pass --normalize-theta0 to rescale)");
  }

  if (cfg.eval_times.empty()) cfg.eval_times = {cfg.t_max};
  double prev = 0.0;
  for (double t : cfg.eval_times) {
    if (!(t > prev)) throw ConfigError("eval-times must be increasing and > 0");
    prev = t;
  }
  if (cfg.eval_times.back() > cfg.t_max + 1e-9) {
    throw ConfigError("eval-times must not exceed t-max");
  }

  switch (cfg.experiment) {
    case Experiment::kMoments:
    case Experiment::kCltCov:
    case Experiment::kCltGauss:
      if (cfg.lambda != 0.0) {
        throw ConfigError("this experiment requires lambda = 0");
      }
      break;
    case Experiment::kOuTimechange:
      if (cfg.n != 2) throw ConfigError("ou-timechange requires n = 2");
      if (!(cfg.lambda > 0.0)) {
        throw ConfigError("ou-timechange requires lambda > 0");
      }
      break;
    default:
      break;
  }
  if (cfg.experiment == Experiment::kCltGauss && cfg.K % cfg.groups != 0) {
    throw ConfigError("groups must divide K for clt-gauss");
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  nlohmann::json doc;
  doc["experiment"] = experiment_token(cfg.experiment);
  doc["n"] = cfg.n;
  doc["theta0"] = cfg.theta0;
  doc["lambda"] = cfg.lambda;
  doc["K"] = cfg.K;
  doc["dt"] = cfg.dt;
  doc["t_max"] = cfg.t_max;
  doc["eval_times"] = cfg.eval_times;
  doc["seed"] = cfg.seed;
  doc["groups"] = cfg.groups;
  const std::string canonical = doc.dump();
  // FNV-1a 64.
  std::uint64_t hash = 1469598103934665603ull;
  for (const char ch : canonical) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace spherclt
