#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aclab/experiments.hpp"

namespace aclab::cli {

// b values for a run: either a single explicit value or a log-spaced grid of
// magnitudes 10^{log_min}..10^{log_max} mirrored over the requested signs,
// optionally including b = 0. resolve() returns the values in ascending order.
struct BGridSpec {
  std::optional<double> value;  // scalar form
  double log_min = 0.0;         // grid form
  double log_max = 0.0;
  int points = 0;
  bool include_zero = false;
  std::string signs = "both";  // "both" | "plus" | "minus"

  bool is_grid() const { return !value.has_value(); }
  std::vector<double> resolve() const;
};

struct DynamicsSpec {
  std::vector<double> a_values{0.0};
  BGridSpec b{};
  double T = 1.0;
  double q0 = 1.0;
};

struct McSpec {
  long long n_paths = 100000;
  std::uint64_t seed = 42;
  double dt_base = 0.0;     // resolved to T/2000 at parse time
  double dt_testing = 0.0;  // 0 = auto (dt_base; tau/64 inside BR testing)
  bool antithetic = false;
  std::string noise = "normal";  // "normal" | "zero"
};

struct LemmaSpecCfg {
  std::string id;
  double Q0 = 1.0;
  double alpha = 1.0;
  std::vector<double> beta_values{0.0};  // one row per beta
  double tau = 0.0;   // 0 = auto: ln(11/10)^2 / alpha
  double eta = 0.5;
  double T_hat = 1.0;
};

struct OutputSpec {
  std::string directory = ".";
  bool csv = true;
  bool json = true;
};

// One batch run. threads is runtime-only (flag/environment), never serialized.
struct RunConfig {
  std::string command;  // simulate | sweep | verify-lemma | baselines
  DynamicsSpec dynamics{};
  std::vector<StrategySpec> strategies;
  std::optional<LemmaSpecCfg> lemma;
  McSpec mc{};
  OutputSpec output{};
  int threads = 1;
};

// Parses and validates a config document. Unknown keys anywhere are rejected;
// command-specific requirements (strategy counts, lemma block presence) are
// enforced here so run() can assume a well-formed config. Throws schema_error.
RunConfig parse_config(const std::string& json_text);

// Normalized serialization: defaults materialized, b scalar as {"value": v}.
// parse_config(to_json(cfg)) reproduces cfg exactly.
std::string to_json(const RunConfig& cfg);

}  // namespace aclab::cli
