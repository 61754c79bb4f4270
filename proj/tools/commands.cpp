#include "commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "aclab/errors.hpp"
#include "aclab/experiments.hpp"
#include "aclab/io.hpp"
#include "aclab/sde.hpp"
#include "aclab/strategy.hpp"

namespace aclab::cli {

namespace {

McConfig make_mc(const RunConfig& cfg) {
  McConfig mc;
  mc.n_paths = cfg.mc.n_paths;
  mc.seed = cfg.mc.seed;
  mc.grid.dt_base = cfg.mc.dt_base;
  mc.grid.dt_testing = cfg.mc.dt_testing;
  mc.grid.t_end = cfg.dynamics.T;
  mc.antithetic = cfg.mc.antithetic;
  mc.noise = cfg.mc.noise == "zero" ? NoiseMode::zero : NoiseMode::normal;
  mc.threads = cfg.threads;
  return mc;
}

std::filesystem::path prepare_output_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output.directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw schema_error("output directory '" + dir.string() +
                       "' cannot be created: " + ec.message());
  }
  return dir;
}

void write_file(const std::filesystem::path& file,
                const std::function<void(std::ostream&)>& emit) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw schema_error("cannot open '" + file.string() + "' for writing");
  }
  emit(os);
  os.flush();
  if (!os) {
    throw schema_error("write to '" + file.string() + "' failed");
  }
}

// Grid resolution mirrors regret_sweep's per-cell policy so `simulate` and
// sweeps traverse identical grids for the same parameters.
SimGrid resolve_grid(SimGrid grid, double T, const StrategyBlueprint& bp) {
  grid.t_end = T;
  if (!(grid.dt_base > 0.0)) grid.dt_base = T / 2000.0;
  if (!(grid.dt_testing > 0.0)) {
    grid.dt_testing = grid.dt_base;
    if (const auto* br = std::get_if<BRLaw>(&bp.law)) {
      if (br->regime == BRRegime::large_a) {
        grid.dt_testing = std::min(grid.dt_base, br->params.tau / 64.0);
      }
    }
  }
  return grid;
}

void run_simulate(const RunConfig& cfg) {
  const auto dir = prepare_output_dir(cfg);
  const double a = cfg.dynamics.a_values.front();
  const double b = cfg.dynamics.b.resolve().front();
  const ProblemDynamics dyn{a, b, cfg.dynamics.T, cfg.dynamics.q0};
  const StrategyBlueprint bp =
      instantiate_strategy(cfg.strategies.front(), a, b, dyn.T, dyn.q0);
  const McConfig mc = make_mc(cfg);
  const SimGrid grid = resolve_grid(mc.grid, dyn.T, bp);

  for (long long k = 0; k < mc.n_paths; ++k) {
    TrajectoryLog log;
    try {
      log = simulate_controlled_path(
          dyn, bp, grid,
          NoiseSource(mc.seed, static_cast<std::uint64_t>(k), mc.noise));
    } catch (const error& e) {
      throw mc_error(std::string("simulate: ") + e.what(), mc.seed,
                     static_cast<long>(k));
    }
    const auto file = dir / ("trajectory_" + std::to_string(k) + ".csv");
    write_file(file, [&](std::ostream& os) { write_trajectory_csv(os, log); });
    std::cerr << "simulate: path " << k << " steps " << log.times.size() - 1
              << " cost " << num17(log.cost) << " -> " << file.string()
              << "\n";
  }
}

void run_sweep(const RunConfig& cfg, const std::vector<StrategySpec>& strategies) {
  const auto dir = prepare_output_dir(cfg);
  SweepSpec spec;
  spec.a_values = cfg.dynamics.a_values;
  spec.b_values = cfg.dynamics.b.resolve();
  spec.T = cfg.dynamics.T;
  spec.q0 = cfg.dynamics.q0;
  spec.strategies = strategies;

  const McConfig mc = make_mc(cfg);
  const std::vector<RegretRow> rows =
      regret_sweep(spec, mc, [](const RegretRow& row) {
        std::cerr << "sweep: a=" << num17(row.a) << " b=" << num17(row.b)
                  << " " << row.strategy << " mreg=" << num17(row.mreg);
        if (!row.flags.empty()) std::cerr << " [" << row.flags << "]";
        std::cerr << "\n";
      });

  if (cfg.output.csv) {
    write_file(dir / "regret.csv",
               [&](std::ostream& os) { write_regret_csv(os, rows); });
    std::cerr << cfg.command << ": wrote " << (dir / "regret.csv").string()
              << " (" << rows.size() << " rows)\n";
  }
  if (cfg.output.json) {
    const std::string summary = sweep_summary_json(rows, worst_case_regret(rows));
    write_file(dir / "summary.json", [&](std::ostream& os) { os << summary; });
    std::cerr << cfg.command << ": wrote " << (dir / "summary.json").string()
              << "\n";
  }
}

// The baselines command compares BR against the fixed reference set from the
// bounded-regret experiment: CG(0), CG(1), CG(-1), and opt at the cell's b.
std::vector<StrategySpec> baseline_strategies() {
  std::vector<StrategySpec> out(5);
  out[0].kind = StrategySpec::Kind::br;
  out[1].kind = StrategySpec::Kind::constant_gain;
  out[1].alpha = 0.0;
  out[2].kind = StrategySpec::Kind::constant_gain;
  out[2].alpha = 1.0;
  out[3].kind = StrategySpec::Kind::constant_gain;
  out[3].alpha = -1.0;
  out[4].kind = StrategySpec::Kind::optimal_known;
  return out;
}

void run_verify_lemma(const RunConfig& cfg) {
  const auto dir = prepare_output_dir(cfg);
  const LemmaSpecCfg& lem = *cfg.lemma;
  const McConfig mc = make_mc(cfg);

  std::vector<LemmaRow> rows;
  rows.reserve(lem.beta_values.size());
  for (double beta : lem.beta_values) {
    LemmaTrialSpec trial;
    trial.lemma = lem.id;
    trial.Q0 = lem.Q0;
    trial.alpha = lem.alpha;
    trial.beta = beta;
    trial.tau = lem.tau > 0.0
                    ? lem.tau
                    : std::log(1.1) * std::log(1.1) / lem.alpha;
    trial.eta = lem.eta;
    trial.T_hat = lem.T_hat;
    trial.mc = mc;

    ProbEstimate est;
    if (lem.id == "bkpl-A" || lem.id == "bkpl-B") {
      const BkplEstimate both = estimate_lemma_bkpl(trial);
      est = lem.id == "bkpl-A" ? both.stay : both.exit;
    } else {
      est = estimate_lemma_nhl(trial);
    }

    nlohmann::json params{
        {"Q0", trial.Q0},     {"alpha", trial.alpha}, {"beta", trial.beta},
        {"tau", trial.tau},   {"eta", trial.eta},     {"T_hat", trial.T_hat},
        {"n_paths", mc.n_paths}, {"seed", mc.seed},
    };
    LemmaRow row{lem.id, params.dump(), est.p, est.std_error, est.n};
    std::cerr << "verify-lemma: " << lem.id << " beta=" << num17(beta)
              << " estimate=" << num17(est.p) << " stderr="
              << num17(est.std_error) << "\n";
    rows.push_back(std::move(row));
  }

  write_file(dir / "lemma.csv",
             [&](std::ostream& os) { write_lemma_csv(os, rows); });
  std::cerr << "verify-lemma: wrote " << (dir / "lemma.csv").string() << " ("
            << rows.size() << " rows)\n";
}

}  // namespace

void run_command(const RunConfig& cfg) {
  if (cfg.command == "simulate") {
    run_simulate(cfg);
  } else if (cfg.command == "sweep") {
    run_sweep(cfg, cfg.strategies);
  } else if (cfg.command == "baselines") {
    run_sweep(cfg, baseline_strategies());
  } else if (cfg.command == "verify-lemma") {
    run_verify_lemma(cfg);
  } else {
    throw schema_error("unknown command '" + cfg.command + "'");
  }
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Adaptive-control regret laboratory"};
  app.name("aclab");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::int64_t seed = -1;

  CLI::App* run = app.add_subcommand("run", "Execute one batch config");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Output directory (beats config value)");
  run->add_option("--threads", threads, "Worker threads (beats config value)")
      ->envname("ACLAB_THREADS");
  run->add_option("--seed", seed, "RNG seed (beats config value)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  RunConfig cfg;
  try {
    cfg = parse_config(buf.str());
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!out_dir.empty()) cfg.output.directory = out_dir;
  if (seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) cfg.threads = threads;

  try {
    run_command(cfg);
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mc_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << " [replay: seed="
              << cfg.mc.seed << "]\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << " [replay: seed="
              << cfg.mc.seed << "]\n";
    return 3;
  }
  return 0;
}

}  // namespace aclab::cli
