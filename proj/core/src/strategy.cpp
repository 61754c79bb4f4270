#include "aclab/strategy.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "aclab/analytics.hpp"
#include "aclab/errors.hpp"

namespace aclab {

namespace {

using nlohmann::json;

void require_finite(double x, const char* name, const char* where) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << where << ": " << name << " = " << x << " is not finite";
    throw domain_error(os.str());
  }
}

void validate_problem(double a, double T, double q0, const char* where) {
  require_finite(a, "a", where);
  require_finite(T, "T", where);
  require_finite(q0, "q0", where);
  if (T <= 0) {
    throw domain_error(std::string(where) + ": T = " + std::to_string(T) +
                       " must be > 0");
  }
}

std::string format_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

int mirror_sign(const BRParams& p) { return p.q0 < 0 ? -1 : 1; }

// Affine law of one automaton state in mirrored coordinates (q~ = s·q, so the
// automaton always faces a positive starting position).
struct MirroredLaw {
  double g;
  double h;
  double deadline;
  bool testing;
};

MirroredLaw br_law_mirrored(const BRParams& p, const BRState& st) {
  const double T = p.T;
  return std::visit(
      [&](const auto& s) -> MirroredLaw {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ep0Test>) {
          return {-1.0, 0.0, 0.1 / p.a, false};
        } else if constexpr (std::is_same_v<S, Ep0Control>) {
          return {s.dir * p.K, 0.0, T, false};
        } else if constexpr (std::is_same_v<S, EpNuTest>) {
          // Constant probe u = e^nu·q(t_nu)/sqrt(a·tau), frozen at entry.
          const double h = std::exp(s.nu) * s.q_entry / std::sqrt(p.a * p.tau);
          return {0.0, h, s.deadline, true};
        } else if constexpr (std::is_same_v<S, EpNuControl2>) {
          return {p.K * std::exp(s.nu), 0.0, T, false};
        } else if constexpr (std::is_same_v<S, EpNuControl3>) {
          return {-p.K * std::exp(s.nu), 0.0, T, false};
        } else if constexpr (std::is_same_v<S, B0>) {
          return {-1.0, 0.0, T, false};
        } else if constexpr (std::is_same_v<S, B1>) {
          return {1.0, 0.0, T, false};
        } else if constexpr (std::is_same_v<S, N0>) {
          return {-1.0, 0.0, 0.1 / std::abs(p.a), false};
        } else if constexpr (std::is_same_v<S, N1Control>) {
          return {s.dir * p.K, 0.0, T, false};
        } else {
          // Apathy, B2, N1Apathy, N2: u = 0 to the horizon.
          return {0.0, 0.0, T, false};
        }
      },
      st);
}

// Successor for "enter Epoch nu" in the large-a regime: Testing Subepoch when
// nu ≤ nu_star, the final (apathetic) epoch otherwise.
BRState enter_epoch(const BRParams& p, int nu, double t, double q_mirrored) {
  if (nu > p.nu_star) return Apathy{};
  return EpNuTest{nu, t, q_mirrored, std::min(t + p.tau, p.T)};
}

}  // namespace

BRRegime br_regime(const BRParams& p) {
  if (p.a > p.A) return BRRegime::large_a;
  if (p.a < -p.A) return BRRegime::negative_a;
  return BRRegime::bounded_a;
}

BRState br_initial_state(const BRParams& p) {
  switch (br_regime(p)) {
    case BRRegime::large_a:
      return Ep0Test{};
    case BRRegime::negative_a:
      return N0{};
    case BRRegime::bounded_a:
    default:
      return B0{};
  }
}

std::string br_state_tag(const BRState& st) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ep0Test>) return "0i";
        else if constexpr (std::is_same_v<S, Ep0Control>)
          return s.dir > 0 ? "0ii.up" : "0ii.down";
        else if constexpr (std::is_same_v<S, EpNuTest>)
          return "test:" + std::to_string(s.nu);
        else if constexpr (std::is_same_v<S, EpNuControl2>)
          return "ctrl2:" + std::to_string(s.nu);
        else if constexpr (std::is_same_v<S, EpNuControl3>)
          return "ctrl3:" + std::to_string(s.nu);
        else if constexpr (std::is_same_v<S, Apathy>) return "apathy";
        else if constexpr (std::is_same_v<S, B0>) return "b0";
        else if constexpr (std::is_same_v<S, B1>) return "b1";
        else if constexpr (std::is_same_v<S, B2>) return "b2";
        else if constexpr (std::is_same_v<S, N0>) return "n0";
        else if constexpr (std::is_same_v<S, N1Control>)
          return s.dir > 0 ? "n1.up" : "n1.down";
        else if constexpr (std::is_same_v<S, N1Apathy>) return "n1.apathy";
        else return "n2";
      },
      st);
}

ControlDecision br_control(const BRParams& p, const BRState& st, double t,
                           double q) {
  (void)t;
  const int s = mirror_sign(p);
  const MirroredLaw ml = br_law_mirrored(p, st);
  return ControlDecision{ml.g * q + s * ml.h, std::min(ml.deadline, p.T)};
}

std::optional<BRState> br_transition(const BRParams& p, const BRState& st,
                                     double t, double q) {
  const int sgn = mirror_sign(p);
  const double qm = sgn * q;           // mirrored position
  const double q0m = std::abs(p.q0);   // mirrored starting position

  return std::visit(
      [&](const auto& s) -> std::optional<BRState> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ep0Test>) {
          // Crossings win over the deadline at a shared grid point.
          if (qm >= 2.0 * q0m) return BRState{Ep0Control{+1, qm}};
          if (qm <= 0.5 * q0m) return BRState{Ep0Control{-1, qm}};
          if (t >= 0.1 / p.a) return enter_epoch(p, 1, t, qm);
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, Ep0Control>) {
          if (std::abs(qm) >= 2.0 * std::abs(s.q_entry))
            return enter_epoch(p, 1, t, qm);
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, EpNuTest>) {
          const double thr = std::abs(s.q_entry) * std::sqrt(p.a * p.tau);
          if (std::abs(qm - s.q_entry) > thr)
            return BRState{EpNuControl2{s.nu, qm}};
          if (t >= s.deadline) return enter_epoch(p, s.nu + 1, t, qm);
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, EpNuControl2>) {
          if (std::abs(qm) >= 2.0 * std::abs(s.q_entry))
            return BRState{EpNuControl3{s.nu, qm}};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, EpNuControl3>) {
          if (std::abs(qm) >= 2.0 * std::abs(s.q_entry))
            return enter_epoch(p, s.nu + 1, t, qm);
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, B0>) {
          if (std::abs(qm) >= 2.0 * q0m) return BRState{B1{}};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, B1>) {
          if (std::abs(qm) >= 4.0 * q0m) return BRState{B2{}};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, N0>) {
          if (qm >= 2.0 * q0m) return BRState{N1Control{+1}};
          if (qm <= 0.5 * q0m) return BRState{N1Control{-1}};
          if (t >= 0.1 / std::abs(p.a)) return BRState{N1Apathy{}};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, N1Control>) {
          if (std::abs(qm) >= 4.0 * q0m) return BRState{N2{}};
          return std::nullopt;
        } else {
          // Apathy, B2, N1Apathy, N2 are absorbing.
          return std::nullopt;
        }
      },
      st);
}

// ---------------------------------------------------------------------------
// Blueprint construction
// ---------------------------------------------------------------------------

StrategyBlueprint make_constant_gain(double alpha, double a, double T, double q0) {
  require_finite(alpha, "alpha", "make_constant_gain");
  validate_problem(a, T, q0, "make_constant_gain");
  return StrategyBlueprint{ConstantGainLaw{alpha}, a, T, q0};
}

StrategyBlueprint make_optimal_known(double beta, double a, double T, double q0) {
  require_finite(beta, "beta", "make_optimal_known");
  validate_problem(a, T, q0, "make_optimal_known");
  return StrategyBlueprint{OptimalKnownLaw{beta}, a, T, q0};
}

StrategyBlueprint make_br(double a, double T, double q0,
                          const BROverrides& ov) {
  validate_problem(a, T, q0, "make_br");
  if (std::abs(q0) < 1.0) {
    throw hypothesis_error("make_br: |q0| = " + std::to_string(std::abs(q0)) +
                           " < 1 violates the starting-position hypothesis");
  }

  BRParams p{};
  p.a = a;
  p.T = T;
  p.q0 = q0;
  p.A = ov.A.value_or(std::max(2.0, 0.25 / T));
  p.K = ov.K.value_or(1000.0);
  if (!(p.A >= 2.0) || !(p.A > 1.0 / (5.0 * T))) {
    throw hypothesis_error("make_br: A = " + std::to_string(p.A) +
                           " must satisfy A >= 2 and A > 1/(5T)");
  }
  if (!(p.K >= 1000.0)) {
    throw hypothesis_error("make_br: K = " + std::to_string(p.K) +
                           " must be >= 1000");
  }

  p.nu_star = 0;
  p.tau = 0.0;
  if (br_regime(p) == BRRegime::large_a) {
    p.nu_star = static_cast<int>(std::floor(a * T));
    const double logr = std::log(11.0 / 10.0);
    const double denom = a * (p.nu_star + 1.0) * (p.nu_star + 1.0);
    p.tau = ov.tau.value_or(logr * logr / denom);
    if (!(p.tau > 0) || !std::isfinite(p.tau)) {
      throw hypothesis_error("make_br: tau = " + std::to_string(p.tau) +
                             " must be positive and finite");
    }
    if (!(p.tau < 1.0 / a)) {
      throw hypothesis_error("make_br: tau = " + std::to_string(p.tau) +
                             " must satisfy tau < 1/a");
    }
    // Distortion bounds accumulated across Testing Subepochs.
    const double x = std::sqrt(a * p.tau);
    const double up = std::pow(1.0 + x, p.nu_star);
    const double dn = std::pow(1.0 - x, p.nu_star);
    if (!(up < 1.1) || !(dn > 0.9)) {
      std::ostringstream os;
      os << "make_br: tau = " << p.tau << " violates distortion bounds: "
         << "(1+sqrt(a*tau))^nu* = " << up << " (need < 1.1), "
         << "(1-sqrt(a*tau))^nu* = " << dn << " (need > 0.9)";
      throw hypothesis_error(os.str());
    }
  }
  return StrategyBlueprint{BRLaw{p, br_regime(p)}, a, T, q0};
}

// ---------------------------------------------------------------------------
// Blueprint identity and JSON
// ---------------------------------------------------------------------------

std::string StrategyBlueprint::id() const {
  if (const auto* cg = std::get_if<ConstantGainLaw>(&law)) {
    return "cg(" + format_num(cg->alpha) + ")";
  }
  if (const auto* opt = std::get_if<OptimalKnownLaw>(&law)) {
    return "opt(" + format_num(opt->beta) + ")";
  }
  return "br";
}

std::string StrategyBlueprint::to_json() const {
  json j;
  if (const auto* cg = std::get_if<ConstantGainLaw>(&law)) {
    j["kind"] = "cg";
    j["alpha"] = cg->alpha;
  } else if (const auto* opt = std::get_if<OptimalKnownLaw>(&law)) {
    j["kind"] = "opt";
    j["beta"] = opt->beta;
  } else {
    const auto& br = std::get<BRLaw>(law);
    j["kind"] = "br";
    j["A"] = br.params.A;
    j["K"] = br.params.K;
    j["tau"] = br.params.tau;
    j["nu_star"] = br.params.nu_star;
  }
  j["a"] = a;
  j["T"] = T;
  j["q0"] = q0;
  return j.dump();
}

StrategyBlueprint StrategyBlueprint::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw schema_error(std::string("blueprint: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw schema_error("blueprint: missing string field 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();

  auto need = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number()) {
      throw schema_error(std::string("blueprint: missing numeric field '") +
                         key + "'");
    }
    return j[key].get<double>();
  };
  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
      bool ok = false;
      for (const char* k : allowed)
        if (item.key() == k) ok = true;
      if (!ok)
        throw schema_error("blueprint: unknown field '" + item.key() + "'");
    }
  };

  const double a = need("a");
  const double T = need("T");
  const double q0 = need("q0");
  if (kind == "cg") {
    reject_unknown({"kind", "alpha", "a", "T", "q0"});
    return make_constant_gain(need("alpha"), a, T, q0);
  }
  if (kind == "opt") {
    reject_unknown({"kind", "beta", "a", "T", "q0"});
    return make_optimal_known(need("beta"), a, T, q0);
  }
  if (kind == "br") {
    reject_unknown({"kind", "A", "K", "tau", "nu_star", "a", "T", "q0"});
    BROverrides ov;
    ov.A = need("A");
    ov.K = need("K");
    const double tau = need("tau");
    if (tau != 0.0) ov.tau = tau;
    StrategyBlueprint bp = make_br(a, T, q0, ov);
    const int nu = std::get<BRLaw>(bp.law).params.nu_star;
    const auto stored = static_cast<long long>(need("nu_star"));
    if (stored != nu) {
      throw schema_error("blueprint: nu_star = " + std::to_string(stored) +
                         " inconsistent with floor(a*T) = " + std::to_string(nu));
    }
    return bp;
  }
  throw schema_error("blueprint: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Per-path controller
// ---------------------------------------------------------------------------

PathController::PathController(const StrategyBlueprint& bp)
    : bp_(&bp), T_(bp.T) {
  if (const auto* br = std::get_if<BRLaw>(&bp.law)) {
    br_ = BRRuntime{br->params, br->regime, br_initial_state(br->params)};
  }
}

StepLaw PathController::law(double t, double q) const {
  (void)q;
  if (br_) {
    const int s = mirror_sign(br_->params);
    const MirroredLaw ml = br_law_mirrored(br_->params, br_->state);
    return StepLaw{ml.g, s * ml.h, std::min(ml.deadline, T_), ml.testing};
  }
  if (const auto* cg = std::get_if<ConstantGainLaw>(&bp_->law)) {
    return StepLaw{-cg->alpha, 0.0, T_, false};
  }
  const auto& opt = std::get<OptimalKnownLaw>(bp_->law);
  // beta = 0 plays u = 0 regardless of kappa, which may be +inf there.
  double gain = 0.0;
  if (opt.beta != 0.0) gain = opt.beta * kappa(T_ - t, opt.beta, bp_->a);
  return StepLaw{-gain, 0.0, T_, false};
}

std::optional<std::string> PathController::observe(double t, double q) {
  if (!br_) return std::nullopt;
  auto next = br_transition(br_->params, br_->state, t, q);
  if (!next) return std::nullopt;
  br_->state = std::move(*next);
  return br_state_tag(br_->state);
}

std::string PathController::state_tag() const {
  if (br_) return br_state_tag(br_->state);
  return bp_->id();
}

}  // namespace aclab
