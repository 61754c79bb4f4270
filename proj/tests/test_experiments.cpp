#include <cmath>
#include <cstdint>
#include <vector>

#include "aclab/analytics.hpp"
#include "aclab/errors.hpp"
#include "aclab/experiments.hpp"
#include "aclab/rng.hpp"
#include "aclab/sde.hpp"
#include "aclab/strategy.hpp"
#include "doctest.h"

using namespace aclab;

namespace {

McConfig mc_of(long long n, std::uint64_t seed, double dt, double T) {
  McConfig mc;
  mc.n_paths = n;
  mc.seed = seed;
  mc.grid = SimGrid{dt, dt, T};
  return mc;
}

// E Cost of the optimal known-b strategy, frozen from independent evaluation
// of kappa(T,b)q0^2 + integral of kappa.
constexpr double kEcostOpt11 = 2.4786349854525334;

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("zero strategy matches its closed-form cost") {
  // u = 0, a = 0: E Cost = q0^2 T + T^2/2 = 1.5.
  const CostEstimate est =
      estimate_expected_cost({0.0, 1.0, 1.0, 1.0},
                             make_constant_gain(0.0, 0.0, 1.0, 1.0),
                             mc_of(4000, 11u, 1e-3, 1.0));
  CHECK(est.n == 4000);
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.05);
  CHECK(std::abs(est.mean - 1.5) < 4.0 * est.std_error + 0.01);
}

TEST_CASE("optimal baseline attains the analytic optimum") {
  const CostEstimate est =
      estimate_expected_cost({1.0, 1.0, 1.0, 1.0},
                             make_optimal_known(1.0, 1.0, 1.0, 1.0),
                             mc_of(4000, 12u, 5e-4, 1.0));
  CHECK(ecost_opt(1.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(kEcostOpt11).epsilon(1e-12));
  CHECK(std::abs(est.mean - kEcostOpt11) <
        4.0 * est.std_error + 0.01 * kEcostOpt11);
}

TEST_CASE("antithetic pairing halves the independent sample count") {
  McConfig mc = mc_of(4000, 13u, 1e-3, 1.0);
  mc.antithetic = true;
  const ProblemDynamics dyn{0.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_constant_gain(0.0, 0.0, 1.0, 1.0);
  const CostEstimate est = estimate_expected_cost(dyn, bp, mc);
  CHECK(est.n == 2000);
  CHECK(std::abs(est.mean - 1.5) < 4.0 * est.std_error + 0.01);

  // Odd paths replay the even stream with negated draws.
  McConfig two = mc_of(2, 13u, 1e-3, 1.0);
  two.antithetic = true;
  const std::vector<double> costs = path_costs(dyn, bp, two);
  CHECK(costs[0] == simulate_path_cost(dyn, bp, two.grid, NoiseSource(13u, 0u)));
  CHECK(costs[1] ==
        simulate_path_cost(dyn, bp, two.grid,
                           NoiseSource(13u, 0u, NoiseMode::normal, 0, true)));
}

TEST_CASE("estimates are bit-identical across reruns and thread counts") {
  const ProblemDynamics dyn{1.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_optimal_known(1.0, 1.0, 1.0, 1.0);
  McConfig mc = mc_of(600, 14u, 1e-3, 1.0);
  const CostEstimate e1 = estimate_expected_cost(dyn, bp, mc);
  const CostEstimate e2 = estimate_expected_cost(dyn, bp, mc);
  mc.threads = 4;
  const CostEstimate e4 = estimate_expected_cost(dyn, bp, mc);
  CHECK(e1.mean == e2.mean);
  CHECK(e1.std_error == e2.std_error);
  CHECK(e1.sum == e4.sum);
  CHECK(e1.sum_sq == e4.sum_sq);
  CHECK(e1.mean == e4.mean);

  // Path k's stream depends only on (seed, k): prefixes agree across sizes.
  mc.threads = 1;
  const std::vector<double> big = path_costs(dyn, bp, mc);
  const std::vector<double> small = path_costs(dyn, bp, mc_of(4, 14u, 1e-3, 1.0));
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
}

TEST_CASE("protocol guards") {
  const ProblemDynamics dyn{0.0, 1.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_constant_gain(0.0, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(estimate_expected_cost(dyn, bp, mc_of(1, 1u, 1e-3, 1.0)),
                  domain_error);
  McConfig odd = mc_of(3, 1u, 1e-3, 1.0);
  odd.antithetic = true;
  CHECK_THROWS_AS(path_costs(dyn, bp, odd), domain_error);
  McConfig zero_workers = mc_of(10, 1u, 1e-3, 1.0);
  zero_workers.threads = 0;
  CHECK_THROWS_AS(path_costs(dyn, bp, zero_workers), domain_error);
}

TEST_CASE("path failures abort with a replayable index") {
  // a = 400 with u = 0 overflows the running cost integral on every path.
  const ProblemDynamics dyn{400.0, 0.0, 1.0, 1.0};
  const StrategyBlueprint bp = make_constant_gain(0.0, 400.0, 1.0, 1.0);
  McConfig mc = mc_of(8, 99u, 5e-4, 1.0);
  mc.threads = 4;
  try {
    (void)path_costs(dyn, bp, mc);
    FAIL("expected mc_error");
  } catch (const mc_error& e) {
    CHECK(e.seed() == 99u);
    CHECK(e.path() == 0);
    CHECK(e.overflow());
  }
}

TEST_CASE("regret of the optimal baseline is one") {
  SweepSpec sweep;
  sweep.a_values = {1.0};
  sweep.b_values = {1.0};
  StrategySpec opt;
  opt.kind = StrategySpec::Kind::optimal_known;
  sweep.strategies = {opt};
  const auto rows = regret_sweep(sweep, mc_of(2500, 15u, 0.0, 0.0));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].strategy == "opt(own-b)");
  CHECK(rows[0].ecost_opt_analytic == doctest::Approx(kEcostOpt11).epsilon(1e-12));
  CHECK(rows[0].flags.empty());
  CHECK(std::abs(rows[0].mreg - 1.0) < 4.0 * rows[0].mreg_std_error + 0.01);
}

TEST_CASE("regret of the zero strategy at b = 0 is one") {
  // With b = 0 the control cannot steer, so u = 0 is optimal.
  SweepSpec sweep;
  sweep.a_values = {1.0};
  sweep.b_values = {0.0};
  StrategySpec cg0;
  cg0.kind = StrategySpec::Kind::constant_gain;
  cg0.alpha = 0.0;
  sweep.strategies = {cg0};
  const auto rows = regret_sweep(sweep, mc_of(2500, 16u, 1e-3, 0.0));
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0].mreg - 1.0) < 4.0 * rows[0].mreg_std_error + 0.01);
}

TEST_CASE("sweep rows come in (a, b, strategy) order with shared noise") {
  SweepSpec sweep;
  sweep.a_values = {0.0, 1.0};
  sweep.b_values = {0.0, 1.0};
  StrategySpec cg0;
  cg0.kind = StrategySpec::Kind::constant_gain;
  StrategySpec cg1 = cg0;
  cg1.alpha = 1.0;
  sweep.strategies = {cg0, cg1};
  int seen = 0;
  const auto rows =
      regret_sweep(sweep, mc_of(200, 17u, 2e-3, 0.0),
                   [&](const RegretRow&) { ++seen; });
  REQUIRE(rows.size() == 8);
  CHECK(seen == 8);
  const char* want[] = {"cg(0)", "cg(1)", "cg(0)", "cg(1)",
                        "cg(0)", "cg(1)", "cg(0)", "cg(1)"};
  for (int i = 0; i < 8; ++i) {
    CHECK(rows[i].a == (i < 4 ? 0.0 : 1.0));
    CHECK(rows[i].b == ((i / 2) % 2 == 0 ? 0.0 : 1.0));
    CHECK(rows[i].strategy == want[i]);
  }
  // cg(0) ignores b entirely, and the noise streams are common across cells:
  // its sampled mean is bit-identical at b = 0 and b = 1.
  CHECK(rows[0].mc_cost.mean == rows[2].mc_cost.mean);
}

TEST_CASE("br cells resolve their own testing grid") {
  SweepSpec sweep;
  sweep.a_values = {10.0};
  sweep.b_values = {0.0};
  StrategySpec br;
  br.kind = StrategySpec::Kind::br;
  sweep.strategies = {br};
  const auto rows = regret_sweep(sweep, mc_of(400, 18u, 0.0, 0.0));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].strategy == "br");
  CHECK(rows[0].flags.empty());
  CHECK(std::isfinite(rows[0].mreg));
  CHECK(rows[0].mreg >= 1.0 - 4.0 * rows[0].mreg_std_error);
}

TEST_CASE("overflow marks the row instead of aborting the sweep") {
  // b = 2 keeps ecost_opt finite at a = 400 while the uncontrolled cg(0)
  // paths overflow; b = 0 would be rejected upfront (infinite denominator).
  SweepSpec sweep;
  sweep.a_values = {400.0, 0.0};
  sweep.b_values = {2.0};
  StrategySpec cg0;
  cg0.kind = StrategySpec::Kind::constant_gain;
  sweep.strategies = {cg0};
  const auto rows = regret_sweep(sweep, mc_of(50, 19u, 0.0, 0.0));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].flags == "overflow");
  CHECK(std::isinf(rows[0].mreg));
  CHECK(std::isinf(rows[0].mc_cost.mean));
  CHECK(rows[0].mreg_std_error == 0.0);
  CHECK(rows[1].flags.empty());
  CHECK(std::isfinite(rows[1].mreg));
}

TEST_CASE("worst-case regret table") {
  const auto mk = [](double a, double b, const char* s, double mreg) {
    RegretRow r;
    r.a = a;
    r.b = b;
    r.strategy = s;
    r.mreg = mreg;
    return r;
  };
  // Single row.
  {
    const auto w = worst_case_regret({mk(1, 2, "s", 1.5)});
    REQUIRE(w.size() == 1);
    CHECK(w[0].strategy == "s");
    CHECK(w[0].max_mreg == 1.5);
    CHECK(w[0].argmax_a == 1.0);
    CHECK(w[0].argmax_b == 2.0);
  }
  // Argmax over cells, several strategies.
  {
    const auto w = worst_case_regret({mk(1, 2, "s", 1.2), mk(1, 2, "t", 2.0),
                                      mk(1, 5, "s", 3.4), mk(1, 5, "t", 1.0)});
    REQUIRE(w.size() == 2);
    CHECK(w[0].strategy == "s");
    CHECK(w[0].max_mreg == 3.4);
    CHECK(w[0].argmax_b == 5.0);
    CHECK(w[1].strategy == "t");
    CHECK(w[1].max_mreg == 2.0);
    CHECK(w[1].argmax_b == 2.0);
  }
  // +inf propagates to the summary.
  {
    const double inf = std::numeric_limits<double>::infinity();
    const auto w = worst_case_regret({mk(1, 2, "s", 1.2), mk(1, 5, "s", inf)});
    CHECK(std::isinf(w[0].max_mreg));
  }
  CHECK_THROWS_AS(worst_case_regret({}), domain_error);
  CHECK_THROWS_AS(worst_case_regret(
                      {mk(1, 2, "s", 1.0), mk(1, 5, "s", 1.0), mk(1, 2, "t", 1.0)}),
                  domain_error);
}

TEST_CASE("probe lemma guards") {
  LemmaTrialSpec spec;
  spec.lemma = "bkpl-A";
  spec.mc = mc_of(100, 1u, 0.0, 0.0);
  spec.alpha = 0.0;
  spec.tau = 0.001;
  CHECK_THROWS_AS(estimate_lemma_bkpl(spec), hypothesis_error);
  spec.alpha = 50.0;
  spec.tau = 1.0;  // alpha*tau far above ln(11/10)^2
  CHECK_THROWS_AS(estimate_lemma_bkpl(spec), hypothesis_error);
  spec.tau = 0.001;
  spec.Q0 = 0.0;
  CHECK_THROWS_AS(estimate_lemma_bkpl(spec), hypothesis_error);
}

TEST_CASE("probe lemma: drift-free probes stay, strong probes exit") {
  LemmaTrialSpec spec;
  spec.Q0 = 1.0;
  spec.alpha = 4.0;
  const double log_r = std::log(11.0 / 10.0);
  spec.tau = log_r * log_r / spec.alpha;
  spec.mc = mc_of(2000, 101u, 0.0, 0.0);

  spec.beta = 0.0;
  const BkplEstimate calm = estimate_lemma_bkpl(spec);
  CHECK(calm.stay.p + calm.exit.p == 1.0);
  CHECK(calm.stay.n == 2000);
  CHECK(calm.exit.p > 0.02);
  CHECK(calm.exit.p < 0.25);

  // Union bound by the driftless sup-crossing law: the deviation is
  // e^{alpha t} X(t) plus the drift ramp (e^{alpha t} - 1) Q0.
  const double thr = std::sqrt(spec.alpha * spec.tau);
  const double ramp = std::expm1(spec.alpha * spec.tau);
  const double margin = (thr - ramp) / std::exp(spec.alpha * spec.tau);
  const double bound = 2.0 * reflection_sup_prob(spec.alpha, spec.tau, margin);
  CHECK(calm.exit.p <= bound + 4.0 * calm.exit.std_error);

  spec.beta = 3.0 * spec.alpha;
  const BkplEstimate pushed = estimate_lemma_bkpl(spec);
  CHECK(pushed.exit.p > 0.9);
  CHECK(pushed.exit.p > calm.exit.p);
}

TEST_CASE("no-hiding guards") {
  LemmaTrialSpec spec;
  spec.lemma = "nhl-Ai";
  spec.alpha = 1.0;
  spec.mc = mc_of(100, 1u, 0.0, 0.0);
  spec.eta = 2.0;  // above 1/ln 2
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
  spec.eta = 0.5;
  spec.Q0 = -1.0;
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
  spec.Q0 = 1.0;
  spec.lemma = "nhl-??";
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), domain_error);
  spec.lemma = "nhl-Ai";
  spec.alpha = -1.0;
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
  spec.lemma = "nhl-Bi";
  spec.alpha = 1.0;
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
  spec.lemma = "nhl-C";
  spec.alpha = 0.0;
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
  spec.alpha = 1.0;
  spec.T_hat = 0.0;
  CHECK_THROWS_AS(estimate_lemma_nhl(spec), hypothesis_error);
}

TEST_CASE("no-hiding events are rare at strong drift, common at weak drift") {
  LemmaTrialSpec spec;
  spec.Q0 = 1.0;
  spec.eta = 0.5;
  spec.T_hat = 1.0;
  spec.mc = mc_of(1500, 102u, 0.0, 0.0);

  spec.alpha = 50.0;
  spec.lemma = "nhl-Ai";
  CHECK(estimate_lemma_nhl(spec).p < 0.03);
  spec.lemma = "nhl-Aii";
  CHECK(estimate_lemma_nhl(spec).p < 0.03);
  spec.alpha = -50.0;
  spec.lemma = "nhl-Bi";
  CHECK(estimate_lemma_nhl(spec).p < 0.03);
  spec.lemma = "nhl-Biii";
  CHECK(estimate_lemma_nhl(spec).p < 0.03);

  // Vacuous regime: at alpha = 0.01 the truncated A.i window keeps the
  // doubling event unlikely, so the "failure" frequency is large.
  spec.alpha = 0.01;
  spec.lemma = "nhl-Ai";
  CHECK(estimate_lemma_nhl(spec).p > 0.5);

  // Two-sided case: well-defined frequency, reproducible.
  spec.alpha = 4.0;
  spec.lemma = "nhl-C";
  const ProbEstimate c1 = estimate_lemma_nhl(spec);
  const ProbEstimate c2 = estimate_lemma_nhl(spec);
  CHECK(c1.p == c2.p);
  CHECK(c1.p >= 0.0);
  CHECK(c1.p <= 1.0);
  CHECK(c1.n == 1500);
}

TEST_CASE("discrete sup-crossing estimate sits just below the closed form") {
  const double closed = reflection_sup_prob(0.0, 1.0, 1.0);
  CHECK(closed == doctest::Approx(0.3173105078629141).epsilon(1e-12));
  const ProbEstimate est =
      estimate_reflection_sup(0.0, 1.0, 1.0, 1e-3, mc_of(4000, 103u, 0.0, 0.0));
  CHECK(est.p <= closed + 4.0 * est.std_error);
  CHECK(est.p >= closed - 0.03 - 4.0 * est.std_error);
  CHECK_THROWS_AS(
      estimate_reflection_sup(0.0, 1.0, 1.0, 2.0, mc_of(100, 1u, 0.0, 0.0)),
      domain_error);
}

TEST_CASE("halving dt shrinks the quadrature bias on a coupled stream") {
  // The same dyadic stream drives both resolutions: pair_depth 1 at dt sums
  // the two depth-0 draws of dt/2, so per-path differences isolate the
  // left-endpoint quadrature bias from the Monte Carlo noise.
  struct Cell {
    double a, b, alpha;
  };
  for (const Cell& c : {Cell{0.0, 2.0, 1.0}, Cell{5.0, -10.0, -1.0}}) {
    const ProblemDynamics dyn{c.a, c.b, 1.0, 1.0};
    const StrategyBlueprint bp = make_constant_gain(c.alpha, c.a, 1.0, 1.0);
    const double exact = ecost_simple_feedback(
        GainSchedule::constant_gain(c.alpha, 1.0), c.a, c.b, 1.0);

    McConfig coarse = mc_of(1200, 104u, 1e-3, 1.0);
    coarse.pair_depth = 1;
    McConfig fine = mc_of(1200, 104u, 5e-4, 1.0);
    const std::vector<double> cc = path_costs(dyn, bp, coarse);
    const std::vector<double> cf = path_costs(dyn, bp, fine);

    const CostEstimate ec = estimate_expected_cost(dyn, bp, coarse);
    const CostEstimate ef = estimate_expected_cost(dyn, bp, fine);
    CHECK(std::abs(ec.mean - exact) < 4.0 * ec.std_error + 0.01 * exact);
    CHECK(std::abs(ef.mean - exact) < 4.0 * ef.std_error + 0.01 * exact);

    // Left-endpoint sums over-integrate the decaying running cost and the
    // overshoot halves with dt, so coarse minus fine is positive per path.
    double dsum = 0.0, dsq = 0.0;
    for (std::size_t i = 0; i < cc.size(); ++i) {
      const double d = cc[i] - cf[i];
      dsum += d;
      dsq += d * d;
    }
    const double n = static_cast<double>(cc.size());
    const double dmean = dsum / n;
    const double dse = std::sqrt((dsq / n - dmean * dmean) / (n - 1.0));
    CHECK(dmean > 0.0);
    CHECK(dmean > 4.0 * dse);
  }
}

}  // TEST_SUITE
