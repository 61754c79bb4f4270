#include "aclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "aclab/analytics.hpp"
#include "aclab/errors.hpp"

namespace aclab {

namespace {

double expm1_over(double x) {
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

// Fixed-shape pairwise reduction: the summation tree depends only on the
// element count, so totals are bit-identical regardless of how the values
// were produced (thread count, chunking).
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum_sq(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_sq(v, half) + pairwise_sum_sq(v + half, n - half);
}

CostEstimate stats_from_samples(const std::vector<double>& samples) {
  CostEstimate est;
  est.n = static_cast<long long>(samples.size());
  est.sum = pairwise_sum(samples.data(), samples.size());
  est.sum_sq = pairwise_sum_sq(samples.data(), samples.size());
  est.mean = est.sum / static_cast<double>(est.n);
  const double var_num = est.sum_sq - est.sum * est.sum / static_cast<double>(est.n);
  const double var = std::max(0.0, var_num / static_cast<double>(est.n - 1));
  est.std_error = std::sqrt(var / static_cast<double>(est.n));
  return est;
}

void validate_mc(const McConfig& mc) {
  if (mc.n_paths < 2) {
    throw domain_error("mc: n_paths = " + std::to_string(mc.n_paths) +
                       " must be >= 2 (standard error needs variance)");
  }
  if (mc.antithetic && (mc.n_paths % 2) != 0) {
    throw domain_error("mc: antithetic pairing needs an even n_paths, got " +
                       std::to_string(mc.n_paths));
  }
  if (mc.threads < 1) {
    throw domain_error("mc: threads = " + std::to_string(mc.threads) +
                       " must be >= 1");
  }
}

std::string format_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

ProbEstimate binomial(long long hits, long long n) {
  ProbEstimate e;
  e.n = n;
  e.p = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(n));
  return e;
}

}  // namespace

std::vector<double> path_costs(const ProblemDynamics& dyn,
                               const StrategyBlueprint& blueprint,
                               const McConfig& mc) {
  validate_mc(mc);
  const long long n = mc.n_paths;
  std::vector<double> costs(static_cast<std::size_t>(n));

  struct WorkerFailure {
    long long path = -1;
    std::string message;
    bool overflow = false;
  };

  const int workers = static_cast<int>(
      std::min<long long>(mc.threads, n));
  std::vector<WorkerFailure> failures(static_cast<std::size_t>(workers));

  auto run_chunk = [&](int w, long long lo, long long hi) {
    for (long long p = lo; p < hi; ++p) {
      const std::uint64_t stream = mc.antithetic
                                       ? static_cast<std::uint64_t>(p >> 1)
                                       : static_cast<std::uint64_t>(p);
      const bool negate = mc.antithetic && (p & 1);
      NoiseSource noise(mc.seed, stream, mc.noise, mc.pair_depth, negate);
      try {
        costs[static_cast<std::size_t>(p)] =
            simulate_path_cost(dyn, blueprint, mc.grid, std::move(noise));
      } catch (const overflow_error& e) {
        failures[w] = WorkerFailure{p, e.what(), true};
        return;
      } catch (const error& e) {
        failures[w] = WorkerFailure{p, e.what(), false};
        return;
      }
    }
  };

  if (workers <= 1) {
    run_chunk(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const long long chunk = n / workers;
    const long long rem = n % workers;
    long long lo = 0;
    for (int w = 0; w < workers; ++w) {
      const long long hi = lo + chunk + (w < rem ? 1 : 0);
      pool.emplace_back(run_chunk, w, lo, hi);
      lo = hi;
    }
    for (auto& th : pool) th.join();
  }

  // Report the lowest failing path index so the abort is deterministic even
  // when several workers fail simultaneously.
  const WorkerFailure* first = nullptr;
  for (const auto& f : failures) {
    if (f.path >= 0 && (first == nullptr || f.path < first->path)) first = &f;
  }
  if (first != nullptr) {
    throw mc_error(first->message, mc.seed, static_cast<long>(first->path),
                   first->overflow);
  }
  return costs;
}

CostEstimate estimate_expected_cost(const ProblemDynamics& dyn,
                                    const StrategyBlueprint& blueprint,
                                    const McConfig& mc) {
  std::vector<double> costs = path_costs(dyn, blueprint, mc);
  if (!mc.antithetic) return stats_from_samples(costs);

  // Antithetic pairs are the independent unit; estimate over pair means.
  std::vector<double> pair_means(costs.size() / 2);
  for (std::size_t i = 0; i < pair_means.size(); ++i) {
    pair_means[i] = 0.5 * (costs[2 * i] + costs[2 * i + 1]);
  }
  return stats_from_samples(pair_means);
}

std::string StrategySpec::label() const {
  switch (kind) {
    case Kind::constant_gain:
      return "cg(" + format_num(alpha) + ")";
    case Kind::optimal_known:
      return beta ? "opt(" + format_num(*beta) + ")" : "opt(own-b)";
    case Kind::br:
    default:
      return "br";
  }
}

StrategyBlueprint instantiate_strategy(const StrategySpec& spec, double a,
                                       double b, double T, double q0) {
  switch (spec.kind) {
    case StrategySpec::Kind::constant_gain:
      return make_constant_gain(spec.alpha, a, T, q0);
    case StrategySpec::Kind::optimal_known:
      return make_optimal_known(spec.beta.value_or(b), a, T, q0);
    case StrategySpec::Kind::br:
    default:
      return make_br(a, T, q0, spec.br_overrides);
  }
}

std::vector<RegretRow> regret_sweep(
    const SweepSpec& sweep, const McConfig& mc,
    const std::function<void(const RegretRow&)>& on_row) {
  validate_mc(mc);
  if (sweep.a_values.empty() || sweep.b_values.empty() ||
      sweep.strategies.empty()) {
    throw domain_error("regret_sweep: a-list, b-grid, and strategies must be non-empty");
  }

  std::vector<RegretRow> rows;
  rows.reserve(sweep.a_values.size() * sweep.b_values.size() *
               sweep.strategies.size());

  for (double a : sweep.a_values) {
    for (double b : sweep.b_values) {
      const double opt = ecost_opt(a, b, sweep.T, sweep.q0);
      if (!std::isfinite(opt) || !(opt > 0.0)) {
        std::ostringstream os;
        os << "regret_sweep: ecost_opt(a=" << a << ", b=" << b
           << ") = " << opt << " is not positive-finite";
        throw domain_error(os.str());
      }
      for (const StrategySpec& spec : sweep.strategies) {
        RegretRow row;
        row.a = a;
        row.b = b;
        row.strategy = spec.label();
        row.ecost_opt_analytic = opt;
        const StrategyBlueprint bp =
            instantiate_strategy(spec, a, b, sweep.T, sweep.q0);

        McConfig cell_mc = mc;
        cell_mc.grid.t_end = sweep.T;
        if (!(cell_mc.grid.dt_base > 0.0)) {
          cell_mc.grid.dt_base = sweep.T / 2000.0;
        }
        if (!(cell_mc.grid.dt_testing > 0.0)) {
          cell_mc.grid.dt_testing = cell_mc.grid.dt_base;
          if (const auto* br = std::get_if<BRLaw>(&bp.law)) {
            if (br->regime == BRRegime::large_a) {
              cell_mc.grid.dt_testing =
                  std::min(cell_mc.grid.dt_base, br->params.tau / 64.0);
            }
          }
        }

        ProblemDynamics dyn{a, b, sweep.T, sweep.q0};
        try {
          row.mc_cost = estimate_expected_cost(dyn, bp, cell_mc);
          row.mreg = row.mc_cost.mean / opt;
          row.mreg_std_error = row.mc_cost.std_error / opt;
        } catch (const mc_error& e) {
          if (!e.overflow()) throw;
          row.mc_cost = CostEstimate{};
          row.mc_cost.n = mc.n_paths;
          row.mc_cost.mean = std::numeric_limits<double>::infinity();
          row.mreg = std::numeric_limits<double>::infinity();
          row.mreg_std_error = 0.0;
          row.flags = "overflow";
        }
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<WorstCase> worst_case_regret(const std::vector<RegretRow>& rows) {
  if (rows.empty()) {
    throw domain_error("worst_case_regret: empty row table");
  }

  // Every (a, b) cell must cover the same strategy set.
  std::set<std::pair<double, double>> cells;
  std::map<std::string, long long> per_strategy;
  for (const auto& row : rows) {
    cells.insert({row.a, row.b});
    ++per_strategy[row.strategy];
  }
  for (const auto& [name, count] : per_strategy) {
    if (count != static_cast<long long>(cells.size())) {
      throw domain_error("worst_case_regret: strategy '" + name +
                         "' covers " + std::to_string(count) + " of " +
                         std::to_string(cells.size()) + " cells");
    }
  }

  std::vector<WorstCase> result;
  for (const auto& row : rows) {
    auto it = std::find_if(result.begin(), result.end(), [&](const WorstCase& w) {
      return w.strategy == row.strategy;
    });
    if (it == result.end()) {
      result.push_back(WorstCase{row.strategy, row.mreg, row.a, row.b});
    } else if (row.mreg > it->max_mreg) {
      it->max_mreg = row.mreg;
      it->argmax_a = row.a;
      it->argmax_b = row.b;
    }
  }
  return result;
}

BkplEstimate estimate_lemma_bkpl(const LemmaTrialSpec& spec) {
  validate_mc(spec.mc);
  if (!(spec.alpha > 0.0)) {
    throw hypothesis_error("bkpl: alpha = " + std::to_string(spec.alpha) +
                           " must be > 0");
  }
  if (spec.Q0 == 0.0 || !std::isfinite(spec.Q0)) {
    throw hypothesis_error("bkpl: Q0 must be non-zero and finite");
  }
  const double log_r = std::log(11.0 / 10.0);
  if (!(spec.tau > 0.0) || spec.alpha * spec.tau > log_r * log_r * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "bkpl: tau = " << spec.tau << " violates the tau-rule "
       << "alpha*tau <= ln(11/10)^2 for alpha = " << spec.alpha;
    throw hypothesis_error(os.str());
  }

  const double drive = spec.beta * spec.Q0 / std::sqrt(spec.alpha * spec.tau);
  const double threshold = std::abs(spec.Q0) * std::sqrt(spec.alpha * spec.tau);
  const int steps = 512;
  const double dt = spec.tau / steps;

  // Transition coefficients are step-invariant: one exp() for the whole run.
  const double E = std::exp(spec.alpha * dt);
  const double F = dt * expm1_over(spec.alpha * dt);
  const double S = std::sqrt(dt * expm1_over(2.0 * spec.alpha * dt));

  long long exits = 0;
  for (long long p = 0; p < spec.mc.n_paths; ++p) {
    NoiseSource noise(spec.mc.seed, static_cast<std::uint64_t>(p), spec.mc.noise);
    double q = spec.Q0;
    for (int k = 0; k < steps; ++k) {
      q = E * q + F * drive + S * noise.next_normal();
      if (std::abs(q - spec.Q0) >= threshold) {
        ++exits;
        break;
      }
    }
  }

  BkplEstimate est;
  est.exit = binomial(exits, spec.mc.n_paths);
  est.stay = binomial(spec.mc.n_paths - exits, spec.mc.n_paths);
  return est;
}

ProbEstimate estimate_lemma_nhl(const LemmaTrialSpec& spec) {
  validate_mc(spec.mc);
  if (!(spec.eta > 0.0) || !(spec.eta < 1.0 / std::log(2.0))) {
    throw hypothesis_error("nhl: eta = " + std::to_string(spec.eta) +
                           " must lie in (0, 1/ln 2)");
  }
  if (!(spec.Q0 > 0.0)) {
    throw hypothesis_error("nhl: Q0 = " + std::to_string(spec.Q0) +
                           " must be > 0");
  }
  if (!(spec.T_hat > 0.0)) {
    throw hypothesis_error("nhl: T_hat must be > 0");
  }

  enum class Case { ai, aii, bi, biii, c };
  Case c;
  if (spec.lemma == "nhl-Ai") c = Case::ai;
  else if (spec.lemma == "nhl-Aii") c = Case::aii;
  else if (spec.lemma == "nhl-Bi") c = Case::bi;
  else if (spec.lemma == "nhl-Biii") c = Case::biii;
  else if (spec.lemma == "nhl-C") c = Case::c;
  else throw domain_error("nhl: unknown lemma id '" + spec.lemma + "'");

  const double alpha = spec.alpha;
  if ((c == Case::ai || c == Case::aii) && !(alpha > 0.0)) {
    throw hypothesis_error("nhl: case " + spec.lemma + " requires alpha > 0");
  }
  if ((c == Case::bi || c == Case::biii) && !(alpha < 0.0)) {
    throw hypothesis_error("nhl: case " + spec.lemma + " requires alpha < 0");
  }
  if (c == Case::c && alpha == 0.0) {
    throw hypothesis_error("nhl: case nhl-C requires alpha != 0");
  }

  double window;
  switch (c) {
    case Case::ai:
    case Case::bi:
      window = 1.0 / (spec.eta * std::abs(alpha));
      break;
    case Case::c:
      window = spec.eta / std::abs(alpha);
      break;
    case Case::aii:
    case Case::biii:
    default:
      window = spec.T_hat;
      break;
  }
  window = std::min(window, spec.T_hat);

  double dt = spec.mc.grid.dt_base;
  if (!(dt > 0.0)) {
    dt = std::min(alpha != 0.0 ? 1.0 / (100.0 * std::abs(alpha)) : window,
                  window / 2000.0);
  }
  const long long steps =
      std::max<long long>(1, static_cast<long long>(std::ceil(window / dt - 1e-9)));
  const double dt_eff = window / static_cast<double>(steps);

  const double E = std::exp(alpha * dt_eff);
  const double S = std::sqrt(dt_eff * expm1_over(2.0 * alpha * dt_eff));
  const double up = 2.0 * spec.Q0;
  const double down = 0.5 * spec.Q0;

  long long hits = 0;
  for (long long p = 0; p < spec.mc.n_paths; ++p) {
    NoiseSource noise(spec.mc.seed, static_cast<std::uint64_t>(p), spec.mc.noise);
    double q = spec.Q0;
    bool event;
    switch (c) {
      case Case::ai: {
        event = true;  // q < 2Q0 throughout
        for (long long k = 0; k < steps; ++k) {
          q = E * q + S * noise.next_normal();
          if (!(q < up)) { event = false; break; }
        }
        break;
      }
      case Case::aii: {
        event = false;  // some q <= Q0/2
        for (long long k = 0; k < steps; ++k) {
          q = E * q + S * noise.next_normal();
          if (q <= down) { event = true; break; }
        }
        break;
      }
      case Case::bi: {
        event = true;  // q > Q0/2 throughout
        for (long long k = 0; k < steps; ++k) {
          q = E * q + S * noise.next_normal();
          if (!(q > down)) { event = false; break; }
        }
        break;
      }
      case Case::biii: {
        event = false;  // some |q| >= 2Q0
        for (long long k = 0; k < steps; ++k) {
          q = E * q + S * noise.next_normal();
          if (std::abs(q) >= up) { event = true; break; }
        }
        break;
      }
      case Case::c:
      default: {
        event = false;  // some q >= 2Q0 or q <= Q0/2
        for (long long k = 0; k < steps; ++k) {
          q = E * q + S * noise.next_normal();
          if (q >= up || q <= down) { event = true; break; }
        }
        break;
      }
    }
    if (event) ++hits;
  }
  return binomial(hits, spec.mc.n_paths);
}

ProbEstimate estimate_reflection_sup(double alpha, double t, double M,
                                     double dt, const McConfig& mc) {
  validate_mc(mc);
  if (!(t > 0.0) || !(M > 0.0) || !(dt > 0.0) || dt > t) {
    throw domain_error("reflection: need t > 0, M > 0, 0 < dt <= t");
  }
  const long long steps =
      std::max<long long>(1, static_cast<long long>(std::ceil(t / dt - 1e-9)));
  const double dt_eff = t / static_cast<double>(steps);

  // Var increment of X over [t_k, t_k + dt]: e^{-2·alpha·t_k}·(1 - e^{-2·alpha·dt})/(2·alpha).
  std::vector<double> sd(static_cast<std::size_t>(steps));
  const double base = dt_eff * expm1_over(-2.0 * alpha * dt_eff);
  for (long long k = 0; k < steps; ++k) {
    const double t_k = static_cast<double>(k) * dt_eff;
    sd[static_cast<std::size_t>(k)] = std::sqrt(std::exp(-2.0 * alpha * t_k) * base);
  }

  long long hits = 0;
  for (long long p = 0; p < mc.n_paths; ++p) {
    NoiseSource noise(mc.seed, static_cast<std::uint64_t>(p), mc.noise);
    double x = 0.0;
    for (long long k = 0; k < steps; ++k) {
      x += sd[static_cast<std::size_t>(k)] * noise.next_normal();
      if (x >= M) { ++hits; break; }
    }
  }
  return binomial(hits, mc.n_paths);
}

}  // namespace aclab
