#pragma once

#include <optional>
#include <string>
#include <variant>

namespace aclab {

// ---------------------------------------------------------------------------
// Blueprints: immutable descriptions of a strategy, instantiable per path.
// ---------------------------------------------------------------------------

// Simple feedback with constant gain: u = −alpha·q.
struct ConstantGainLaw {
  double alpha;
};

// Optimal-for-known-b feedback: u = −beta·kappa(T−t, beta; a)·q.
struct OptimalKnownLaw {
  double beta;
};

enum class BRRegime {
  large_a,    // a > A: epoch/subepoch automaton with exponential probes
  bounded_a,  // |a| ≤ A: three fixed epochs
  negative_a, // a < −A: probe then hold
};

// Tuning of the BR automaton. In the large-a regime tau satisfies the
// distortion bounds (1+sqrt(a·tau))^{nu_star} < 11/10 and
// (1−sqrt(a·tau))^{nu_star} > 9/10, and tau < 1/a.
struct BRParams {
  double A;        // regime threshold, ≥ 2 and > 1/(5T)
  double K;        // control gain scale, ≥ 1000
  double tau;      // Testing Subepoch duration (large-a regime)
  int nu_star;     // ⌊a·T⌋ (large-a regime); 0 otherwise
  double a;        // growth parameter the automaton was built for
  double T;        // horizon
  double q0;       // starting position; sign determines the mirroring flip
};

struct BRLaw {
  BRParams params;
  BRRegime regime;
};

struct StrategyBlueprint {
  std::variant<ConstantGainLaw, OptimalKnownLaw, BRLaw> law;
  double a;   // problem parameters the blueprint was built against
  double T;
  double q0;

  // Stable identifier used in result tables: "cg(<alpha>)", "opt(<beta>)", "br".
  std::string id() const;

  // JSON round-trip. Schema:
  //   {"kind":"cg","alpha":..,"a":..,"T":..,"q0":..}
  //   {"kind":"opt","beta":..,"a":..,"T":..,"q0":..}
  //   {"kind":"br","A":..,"K":..,"tau":..,"nu_star":..,"a":..,"T":..,"q0":..}
  std::string to_json() const;
  static StrategyBlueprint from_json(const std::string& text);
};

StrategyBlueprint make_constant_gain(double alpha, double a, double T, double q0);
StrategyBlueprint make_optimal_known(double beta, double a, double T, double q0);

// Builds the BR blueprint for (a, T, q0): regime selection via
// A = max(2, 0.25/T), nu_star = ⌊aT⌋, tau = (ln(11/10))²/(a·(nu_star+1)²).
// Optional overrides replace A/K/tau before validation. Throws
// hypothesis_error when |q0| < 1 or a validated invariant fails.
struct BROverrides {
  std::optional<double> A;
  std::optional<double> K;
  std::optional<double> tau;
};

StrategyBlueprint make_br(double a, double T, double q0,
                          const BROverrides& overrides = {});

// ---------------------------------------------------------------------------
// BR automaton state. All positions stored in mirrored coordinates
// q~ = sign(q0)·q, so the automaton always sees a positive starting point.
// ---------------------------------------------------------------------------

// Large-a regime (Epoch 0, Epochs 1..nu_star, final Apathy epoch).
struct Ep0Test {};                                   // 0.i: u = −q
struct Ep0Control { int dir; double q_entry; };      // 0.ii: u = ±K·q
struct EpNuTest {                                    // nu.i: constant probe
  int nu;
  double t_entry;
  double q_entry;
  double deadline;  // t_entry + tau, capped at T
};
struct EpNuControl2 { int nu; double q_entry; };     // nu.ii: u = +K·e^nu·q
struct EpNuControl3 { int nu; double q_entry; };     // nu.iii: u = −K·e^nu·q
struct Apathy {};                                    // final epoch: u = 0

// Bounded regime.
struct B0 {};  // u = −q until |q| ≥ 2|q0|
struct B1 {};  // u = +q until |q| ≥ 4|q0|
struct B2 {};  // u = 0

// Negative regime.
struct N0 {};                       // u = −q, deadline 1/(10|a|)
struct N1Control { int dir; };      // u = ±K·q until |q| ≥ 4|q0|
struct N1Apathy {};                 // timeout branch: u = 0 to T
struct N2 {};                       // u = 0

using BRState =
    std::variant<Ep0Test, Ep0Control, EpNuTest, EpNuControl2, EpNuControl3,
                 Apathy, B0, B1, B2, N0, N1Control, N1Apathy, N2>;

// Regime selection: a > A → large_a, a < −A → negative_a, else bounded_a.
BRRegime br_regime(const BRParams& params);

// Initial automaton state for the params' regime.
BRState br_initial_state(const BRParams& params);

// Event tag of a state: "0i", "0ii.up", "0ii.down", "test:<nu>",
// "ctrl2:<nu>", "ctrl3:<nu>", "apathy", "b0".."b2", "n0", "n1.up",
// "n1.down", "n1.apathy", "n2".
std::string br_state_tag(const BRState& state);

// Control decision at (t, q) in true (unmirrored) coordinates.
struct ControlDecision {
  double u;              // control value to hold
  double next_deadline;  // absolute time of the next scheduled decision (≤ T)
};

ControlDecision br_control(const BRParams& params, const BRState& state,
                           double t, double q);

// One transition evaluation at grid point (t, q). Returns the successor state
// when a threshold or deadline predicate fires, std::nullopt otherwise.
// Threshold predicates win over deadline timeouts at the same grid point.
std::optional<BRState> br_transition(const BRParams& params,
                                     const BRState& state, double t, double q);

// ---------------------------------------------------------------------------
// Per-path controller used by the engine: dispatches CG/opt/BR to an affine
// law u = g·q + h and owns the BR state machine.
// ---------------------------------------------------------------------------

struct StepLaw {
  double g;         // feedback gain
  double h;         // feedforward term
  double deadline;  // absolute time of the next scheduled decision (≤ T)
  bool testing;     // true inside BR Testing Subepochs (grid uses dt_testing)
};

class PathController {
 public:
  explicit PathController(const StrategyBlueprint& bp);

  StepLaw law(double t, double q) const;

  // Evaluates transition predicates at a grid point; returns the event tag
  // when the automaton moved.
  std::optional<std::string> observe(double t, double q);

  // Tag describing the current state (used for the t=0 event and dumps).
  std::string state_tag() const;

  bool is_br() const noexcept { return br_.has_value(); }

 private:
  const StrategyBlueprint* bp_;
  double T_;
  struct BRRuntime {
    BRParams params;
    BRRegime regime;
    BRState state;
  };
  std::optional<BRRuntime> br_;
};

}  // namespace aclab
