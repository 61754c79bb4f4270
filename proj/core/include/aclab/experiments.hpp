#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aclab/sde.hpp"
#include "aclab/strategy.hpp"

namespace aclab {

// Monte Carlo protocol. Path p draws noise from NoiseSource(seed, p), so the
// stream is a pure function of (seed, path, step) and estimates are common-
// random-number comparable across strategies and dynamics.
struct McConfig {
  long long n_paths = 100000;  // ≥ 2 (standard error needs variance)
  std::uint64_t seed = 42;
  SimGrid grid{};
  bool antithetic = false;  // pair 2k/2k+1 share a stream with flipped signs
  NoiseMode noise = NoiseMode::normal;
  int threads = 1;      // worker count; results are independent of it
  int pair_depth = 0;   // dyadic block-sum depth for dt-halving couplings
};

// Mean and standard error plus the sufficient statistics they were computed
// from. n is the number of independent samples the statistics describe: the
// path count, or the pair count when antithetic pairing is on.
struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Per-path costs in path order. Deterministic for fixed inputs and seed,
// independent of mc.threads. Any path failure aborts with an mc_error naming
// the (seed, path) to replay.
std::vector<double> path_costs(const ProblemDynamics& dyn,
                               const StrategyBlueprint& blueprint,
                               const McConfig& mc);

// Mean/stderr of accumulate_cost over mc.n_paths independent paths.
// Aggregation is a fixed-shape pairwise tree, so the result is bit-identical
// for any worker count.
CostEstimate estimate_expected_cost(const ProblemDynamics& dyn,
                                    const StrategyBlueprint& blueprint,
                                    const McConfig& mc);

// Strategy description instantiated per sweep cell. optimal_known with no
// explicit beta plays the cell's own b (the optimal baseline).
struct StrategySpec {
  enum class Kind { constant_gain, optimal_known, br };
  Kind kind = Kind::constant_gain;
  double alpha = 0.0;                // constant_gain
  std::optional<double> beta;        // optimal_known; nullopt → cell's b
  BROverrides br_overrides{};        // br
  std::string label() const;
};

struct SweepSpec {
  std::vector<double> a_values;
  std::vector<double> b_values;
  double T = 1.0;
  double q0 = 1.0;
  std::vector<StrategySpec> strategies;
};

// Blueprint for one sweep cell (resolves optimal_known's own-b rule).
StrategyBlueprint instantiate_strategy(const StrategySpec& spec, double a,
                                       double b, double T, double q0);

// One sweep cell. mreg = mc_cost.mean / ecost_opt_analytic. A path overflow
// in the cell is recorded as mreg = +inf with flags = "overflow" instead of
// aborting the sweep.
struct RegretRow {
  double a = 0.0;
  double b = 0.0;
  std::string strategy;
  CostEstimate mc_cost{};
  double ecost_opt_analytic = 0.0;
  double mreg = 0.0;
  double mreg_std_error = 0.0;
  std::string flags;
};

// Rows in deterministic (a, b, strategy) order with common random numbers:
// every cell reuses the same (seed, path, step) noise stream. Zero grid
// fields in mc auto-resolve per cell: dt_base → T/2000, dt_testing →
// dt_base, tightened to tau/64 for BR cells with Testing Subepochs.
// on_row, when set, is invoked once per finished row (progress reporting).
std::vector<RegretRow> regret_sweep(
    const SweepSpec& sweep, const McConfig& mc,
    const std::function<void(const RegretRow&)>& on_row = {});

struct WorstCase {
  std::string strategy;
  double max_mreg = 0.0;
  double argmax_a = 0.0;
  double argmax_b = 0.0;
};

// Per-strategy maximum of mreg over the rows with its argmax cell; +inf
// propagates. Requires a non-empty table covering the same strategy set in
// every (a, b) cell.
std::vector<WorstCase> worst_case_regret(const std::vector<RegretRow>& rows);

// Parameters for one hitting-time lemma trial. Supported lemma ids:
//   bkpl-A, bkpl-B     controlled-probe stay/exit probabilities
//   nhl-Ai, nhl-Aii    no-hiding events for alpha > 0
//   nhl-Bi, nhl-Biii   no-hiding events for alpha < 0
//   nhl-C              two-sided event for alpha != 0
struct LemmaTrialSpec {
  std::string lemma;
  double Q0 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;   // bkpl drift scale
  double tau = 0.0;    // bkpl probe duration
  double eta = 0.5;    // nhl window parameter, in (0, 1/ln 2)
  double T_hat = 1.0;  // truncation horizon for unbounded windows
  McConfig mc{};
};

struct ProbEstimate {
  double p = 0.0;
  double std_error = 0.0;  // binomial
  long long n = 0;
};

// Probe experiment: dq = (alpha·q + beta·Q0·(alpha·tau)^{-1/2})dt + dW from
// Q0, stopped when |q − Q0| ≥ |Q0|·sqrt(alpha·tau), monitored on a tau/512
// grid. stay = no crossing through time tau; exit = 1 − stay.
// Requires alpha > 0, Q0 ≠ 0, and alpha·tau ≤ ln(11/10)² (the tau-rule's
// "sufficiently small" reading).
struct BkplEstimate {
  ProbEstimate stay;
  ProbEstimate exit;
};

BkplEstimate estimate_lemma_bkpl(const LemmaTrialSpec& spec);

// Empirical frequency of the lemma's event for dq = alpha·q dt + dW from
// Q0 > 0. Windows that the statement leaves unbounded (or that exceed T_hat)
// are truncated at T_hat:
//   nhl-Ai    q < 2Q0 on [0, min(1/(eta·alpha), T_hat)]      (alpha > 0)
//   nhl-Aii   exists t in [0, T_hat] with q ≤ Q0/2           (alpha > 0)
//   nhl-Bi    q > Q0/2 on [0, min(1/(eta·|alpha|), T_hat)]   (alpha < 0)
//   nhl-Biii  exists t in [0, T_hat] with |q| ≥ 2Q0          (alpha < 0)
//   nhl-C     exists t in [0, min(eta/|alpha|, T_hat)] with
//             q ≥ 2Q0 or q ≤ Q0/2                            (alpha != 0)
// Grid: mc.grid.dt_base when positive, else min(1/(100|alpha|), window/2000).
ProbEstimate estimate_lemma_nhl(const LemmaTrialSpec& spec);

// Empirical sup-crossing frequency of the centered driftless process
// X(t) = ∫ e^{-alpha·s} dW(s): fraction of paths with max_k X(t_k) ≥ M on a
// uniform dt grid over [0, t]. Discrete monitoring undercounts, so estimates
// sit slightly below the continuous-time closed form reflection_sup_prob.
ProbEstimate estimate_reflection_sup(double alpha, double t, double M,
                                     double dt, const McConfig& mc);

}  // namespace aclab
