#include "config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "aclab/errors.hpp"

namespace aclab::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw schema_error(std::string("config: unknown key '") + item.key() +
                         "' in " + where);
    }
  }
}

double get_num(const json& obj, const char* where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw schema_error(std::string("config: ") + where +
                       " needs numeric field '" + key + "'");
  }
  return obj[key].get<double>();
}

double get_num_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw schema_error(std::string("config: field '") + key +
                       "' must be a number");
  }
  return obj[key].get<double>();
}

bool get_bool_or(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    throw schema_error(std::string("config: field '") + key +
                       "' must be a boolean");
  }
  return obj[key].get<bool>();
}

std::vector<double> get_num_list(const json& v, const char* where) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array() && !v.empty()) {
    for (const auto& item : v) {
      if (!item.is_number()) {
        throw schema_error(std::string("config: ") + where +
                           " must hold numbers");
      }
      out.push_back(item.get<double>());
    }
  } else {
    throw schema_error(std::string("config: ") + where +
                       " must be a number or non-empty list");
  }
  return out;
}

BGridSpec parse_b(const json& v) {
  BGridSpec b;
  if (v.is_number()) {
    b.value = v.get<double>();
    return b;
  }
  if (!v.is_object()) {
    throw schema_error("config: dynamics.b must be a number or grid object");
  }
  if (v.contains("value")) {
    reject_unknown(v, "dynamics.b", {"value"});
    b.value = get_num(v, "dynamics.b", "value");
    return b;
  }
  reject_unknown(v, "dynamics.b",
                 {"log_min", "log_max", "points", "include_zero", "signs"});
  b.log_min = get_num(v, "dynamics.b", "log_min");
  b.log_max = get_num(v, "dynamics.b", "log_max");
  const double pts = get_num(v, "dynamics.b", "points");
  b.points = static_cast<int>(pts);
  if (b.points < 1 || pts != b.points) {
    throw schema_error("config: dynamics.b.points must be a positive integer");
  }
  if (b.points == 1 && b.log_min != b.log_max) {
    throw schema_error("config: dynamics.b with points=1 needs log_min == log_max");
  }
  b.include_zero = get_bool_or(v, "include_zero", false);
  if (v.contains("signs")) {
    if (!v["signs"].is_string()) {
      throw schema_error("config: dynamics.b.signs must be a string");
    }
    b.signs = v["signs"].get<std::string>();
  }
  if (b.signs != "both" && b.signs != "plus" && b.signs != "minus") {
    throw schema_error("config: dynamics.b.signs must be both|plus|minus, got '" +
                       b.signs + "'");
  }
  return b;
}

StrategySpec parse_strategy(const json& v, const char* where) {
  if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) {
    throw schema_error(std::string("config: ") + where +
                       " needs a string field 'kind'");
  }
  const std::string kind = v["kind"].get<std::string>();
  StrategySpec spec;
  if (kind == "cg") {
    reject_unknown(v, where, {"kind", "alpha"});
    spec.kind = StrategySpec::Kind::constant_gain;
    spec.alpha = get_num(v, where, "alpha");
  } else if (kind == "opt") {
    reject_unknown(v, where, {"kind", "beta"});
    spec.kind = StrategySpec::Kind::optimal_known;
    if (v.contains("beta")) spec.beta = get_num(v, where, "beta");
  } else if (kind == "br") {
    reject_unknown(v, where, {"kind", "A", "K", "tau"});
    spec.kind = StrategySpec::Kind::br;
    if (v.contains("A")) spec.br_overrides.A = get_num(v, where, "A");
    if (v.contains("K")) spec.br_overrides.K = get_num(v, where, "K");
    if (v.contains("tau")) spec.br_overrides.tau = get_num(v, where, "tau");
  } else {
    throw schema_error("config: unknown strategy kind '" + kind + "'");
  }
  return spec;
}

json strategy_to_json(const StrategySpec& spec) {
  json v;
  switch (spec.kind) {
    case StrategySpec::Kind::constant_gain:
      v["kind"] = "cg";
      v["alpha"] = spec.alpha;
      break;
    case StrategySpec::Kind::optimal_known:
      v["kind"] = "opt";
      if (spec.beta) v["beta"] = *spec.beta;
      break;
    case StrategySpec::Kind::br:
      v["kind"] = "br";
      if (spec.br_overrides.A) v["A"] = *spec.br_overrides.A;
      if (spec.br_overrides.K) v["K"] = *spec.br_overrides.K;
      if (spec.br_overrides.tau) v["tau"] = *spec.br_overrides.tau;
      break;
  }
  return v;
}

}  // namespace

std::vector<double> BGridSpec::resolve() const {
  if (value) return {*value};
  std::vector<double> mags;
  if (points == 1) {
    mags.push_back(std::pow(10.0, log_min));
  } else {
    const double step = (log_max - log_min) / (points - 1);
    for (int i = 0; i < points; ++i) {
      mags.push_back(std::pow(10.0, log_min + i * step));
    }
  }
  std::vector<double> out;
  if (signs == "both" || signs == "minus") {
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) out.push_back(-*it);
  }
  if (include_zero) out.push_back(0.0);
  if (signs == "both" || signs == "plus") {
    for (double m : mags) out.push_back(m);
  }
  return out;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw schema_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw schema_error("config: top level must be an object");
  }
  reject_unknown(root, "top level",
                 {"command", "dynamics", "strategies", "lemma", "mc", "output"});

  RunConfig cfg;
  if (!root.contains("command") || !root["command"].is_string()) {
    throw schema_error("config: missing string field 'command'");
  }
  cfg.command = root["command"].get<std::string>();
  if (cfg.command != "simulate" && cfg.command != "sweep" &&
      cfg.command != "verify-lemma" && cfg.command != "baselines") {
    throw schema_error("config: command must be simulate|sweep|verify-lemma|baselines, got '" +
                       cfg.command + "'");
  }

  if (root.contains("dynamics")) {
    const json& d = root["dynamics"];
    if (!d.is_object()) throw schema_error("config: dynamics must be an object");
    reject_unknown(d, "dynamics", {"a", "b", "T", "q0"});
    if (d.contains("a")) cfg.dynamics.a_values = get_num_list(d["a"], "dynamics.a");
    if (d.contains("b")) cfg.dynamics.b = parse_b(d["b"]);
    cfg.dynamics.T = get_num_or(d, "T", 1.0);
    cfg.dynamics.q0 = get_num_or(d, "q0", 1.0);
    if (!(cfg.dynamics.T > 0.0)) {
      throw schema_error("config: dynamics.T must be > 0");
    }
  }

  if (root.contains("strategies")) {
    const json& s = root["strategies"];
    if (s.is_object()) {
      cfg.strategies.push_back(parse_strategy(s, "strategies"));
    } else if (s.is_array() && !s.empty()) {
      for (const auto& item : s) {
        cfg.strategies.push_back(parse_strategy(item, "strategies[]"));
      }
    } else {
      throw schema_error("config: strategies must be an object or non-empty list");
    }
  }

  if (root.contains("lemma")) {
    const json& l = root["lemma"];
    if (!l.is_object()) throw schema_error("config: lemma must be an object");
    reject_unknown(l, "lemma", {"id", "Q0", "alpha", "beta", "tau", "eta", "T_hat"});
    LemmaSpecCfg lem;
    if (!l.contains("id") || !l["id"].is_string()) {
      throw schema_error("config: lemma needs a string field 'id'");
    }
    lem.id = l["id"].get<std::string>();
    const std::set<std::string> known = {"bkpl-A", "bkpl-B", "nhl-Ai",
                                         "nhl-Aii", "nhl-Bi", "nhl-Biii",
                                         "nhl-C"};
    if (known.count(lem.id) == 0) {
      throw schema_error("config: unknown lemma id '" + lem.id + "'");
    }
    lem.Q0 = get_num_or(l, "Q0", 1.0);
    lem.alpha = get_num_or(l, "alpha", 1.0);
    if (l.contains("beta")) lem.beta_values = get_num_list(l["beta"], "lemma.beta");
    lem.tau = get_num_or(l, "tau", 0.0);
    lem.eta = get_num_or(l, "eta", 0.5);
    lem.T_hat = get_num_or(l, "T_hat", 1.0);
    cfg.lemma = lem;
  }

  if (root.contains("mc")) {
    const json& m = root["mc"];
    if (!m.is_object()) throw schema_error("config: mc must be an object");
    reject_unknown(m, "mc",
                   {"n_paths", "seed", "dt_base", "dt_testing", "antithetic", "noise"});
    const double n = get_num_or(m, "n_paths", 100000.0);
    cfg.mc.n_paths = static_cast<long long>(n);
    if (cfg.mc.n_paths < 1 || n != static_cast<double>(cfg.mc.n_paths)) {
      throw schema_error("config: mc.n_paths must be a positive integer");
    }
    const double seed = get_num_or(m, "seed", 42.0);
    cfg.mc.seed = static_cast<std::uint64_t>(seed);
    if (seed < 0 || seed != static_cast<double>(cfg.mc.seed)) {
      throw schema_error("config: mc.seed must be a non-negative integer");
    }
    cfg.mc.dt_base = get_num_or(m, "dt_base", 0.0);
    cfg.mc.dt_testing = get_num_or(m, "dt_testing", 0.0);
    if (cfg.mc.dt_base < 0 || cfg.mc.dt_testing < 0) {
      throw schema_error("config: mc step sizes must be >= 0 (0 = default)");
    }
    cfg.mc.antithetic = get_bool_or(m, "antithetic", false);
    if (m.contains("noise")) {
      if (!m["noise"].is_string()) {
        throw schema_error("config: mc.noise must be a string");
      }
      cfg.mc.noise = m["noise"].get<std::string>();
    }
    if (cfg.mc.noise != "normal" && cfg.mc.noise != "zero") {
      throw schema_error("config: mc.noise must be normal|zero, got '" +
                         cfg.mc.noise + "'");
    }
  }
  // The documented default: dt_base = T/2000, resolved here so the normalized
  // form is concrete.
  if (cfg.mc.dt_base == 0.0) cfg.mc.dt_base = cfg.dynamics.T / 2000.0;

  if (root.contains("output")) {
    const json& o = root["output"];
    if (!o.is_object()) throw schema_error("config: output must be an object");
    reject_unknown(o, "output", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) {
        throw schema_error("config: output.directory must be a string");
      }
      cfg.output.directory = o["directory"].get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array() || o["formats"].empty()) {
        throw schema_error("config: output.formats must be a non-empty list");
      }
      cfg.output.csv = false;
      cfg.output.json = false;
      for (const auto& f : o["formats"]) {
        if (!f.is_string()) {
          throw schema_error("config: output.formats entries must be strings");
        }
        const std::string fmt = f.get<std::string>();
        if (fmt == "csv") cfg.output.csv = true;
        else if (fmt == "json") cfg.output.json = true;
        else throw schema_error("config: unknown output format '" + fmt + "'");
      }
    }
  }

  // Command-specific structure.
  const bool needs_strategies =
      cfg.command == "simulate" || cfg.command == "sweep";
  if (needs_strategies && cfg.strategies.empty()) {
    throw schema_error("config: command '" + cfg.command +
                       "' needs a strategies block");
  }
  if (cfg.command == "verify-lemma" && !cfg.lemma) {
    throw schema_error("config: command 'verify-lemma' needs a lemma block");
  }
  if (cfg.command != "verify-lemma" && cfg.lemma) {
    throw schema_error("config: lemma block is only valid for verify-lemma");
  }
  if (cfg.command == "simulate") {
    if (cfg.strategies.size() != 1) {
      throw schema_error("config: simulate needs exactly one strategy");
    }
    if (cfg.dynamics.a_values.size() != 1 || cfg.dynamics.b.resolve().size() != 1) {
      throw schema_error("config: simulate needs scalar dynamics.a and dynamics.b");
    }
  }
  if ((cfg.command == "sweep" || cfg.command == "baselines") &&
      cfg.dynamics.b.resolve().empty()) {
    throw schema_error("config: command '" + cfg.command +
                       "' needs a non-empty dynamics.b");
  }
  if (cfg.command == "baselines" && !cfg.strategies.empty()) {
    throw schema_error("config: baselines builds its own strategy set; remove strategies");
  }
  return cfg;
}

std::string to_json(const RunConfig& cfg) {
  json root;
  root["command"] = cfg.command;

  json d;
  if (cfg.dynamics.a_values.size() == 1) {
    d["a"] = cfg.dynamics.a_values[0];
  } else {
    d["a"] = cfg.dynamics.a_values;
  }
  if (cfg.dynamics.b.value.has_value()) {
    d["b"] = json{{"value", *cfg.dynamics.b.value}};
  } else if (cfg.dynamics.b.points > 0) {
    json b;
    b["log_min"] = cfg.dynamics.b.log_min;
    b["log_max"] = cfg.dynamics.b.log_max;
    b["points"] = cfg.dynamics.b.points;
    b["include_zero"] = cfg.dynamics.b.include_zero;
    b["signs"] = cfg.dynamics.b.signs;
    d["b"] = b;
  }
  // A defaulted b (no value, no grid) is valid only for commands that do not
  // sweep b; it round-trips as an absent field.
  d["T"] = cfg.dynamics.T;
  d["q0"] = cfg.dynamics.q0;
  root["dynamics"] = d;

  if (!cfg.strategies.empty()) {
    json list = json::array();
    for (const auto& s : cfg.strategies) list.push_back(strategy_to_json(s));
    root["strategies"] = list;
  }

  if (cfg.lemma) {
    json l;
    l["id"] = cfg.lemma->id;
    l["Q0"] = cfg.lemma->Q0;
    l["alpha"] = cfg.lemma->alpha;
    if (cfg.lemma->beta_values.size() == 1) {
      l["beta"] = cfg.lemma->beta_values[0];
    } else {
      l["beta"] = cfg.lemma->beta_values;
    }
    l["tau"] = cfg.lemma->tau;
    l["eta"] = cfg.lemma->eta;
    l["T_hat"] = cfg.lemma->T_hat;
    root["lemma"] = l;
  }

  json m;
  m["n_paths"] = cfg.mc.n_paths;
  m["seed"] = cfg.mc.seed;
  m["dt_base"] = cfg.mc.dt_base;
  m["dt_testing"] = cfg.mc.dt_testing;
  m["antithetic"] = cfg.mc.antithetic;
  m["noise"] = cfg.mc.noise;
  root["mc"] = m;

  json o;
  o["directory"] = cfg.output.directory;
  json formats = json::array();
  if (cfg.output.csv) formats.push_back("csv");
  if (cfg.output.json) formats.push_back("json");
  o["formats"] = formats;
  root["output"] = o;

  return root.dump(2) + "\n";
}

}  // namespace aclab::cli
