#pragma once

#include <functional>
#include <optional>
#include <string>

namespace aclab {

// Riccati solution kernel for the scalar LQ problem with drift gain a and
// control gain beta:
//
//   kappa(t, beta; a) = t                                    if a = beta = 0,
//                       tanh(t·rho) / (rho − a·tanh(t·rho))  otherwise,
//
// with rho = sqrt(a² + beta²). kappa ≥ 0 on t ≥ 0. For a > 0 the denominator
// is evaluated in the cancellation-free form
//   beta²/(rho + a) + 2a·e^{−2t·rho}/(1 + e^{−2t·rho}),
// which is positive for all finite inputs; when it underflows to zero
// (beta = 0, a > 0, t huge) the kernel is genuinely beyond double range and
// +infinity is returned.
struct KappaInput {
  double t;     // elapsed time argument, ≥ 0
  double beta;  // control gain hypothesis
  double a;     // drift gain
};

double kappa(const KappaInput& in);
inline double kappa(double t, double beta, double a) {
  return kappa(KappaInput{t, beta, a});
}

// Optimal expected cost for known b:
//   ECost_opt(b) = kappa(T, b)·q0² + ∫₀ᵀ kappa(t, b) dt,
// integral by adaptive Gauss-Kronrod (relative tolerance 1e-10). Even in b.
// Returns +infinity when kappa overflows on [0, T].
double ecost_opt(double a, double b, double T, double q0);

// Time-varying gain v(t) of a simple feedback strategy u = −v(t)·q on [0, T].
// `constant` is set when v ≡ const; closed forms are used in that case
// instead of nested quadrature.
struct GainSchedule {
  std::function<double(double)> v;
  double T = 0.0;
  std::optional<double> constant;

  // v ≡ alpha (the strategy CG(alpha)).
  static GainSchedule constant_gain(double alpha, double T);
  // v(t) = beta·kappa(T−t, beta; a) (the strategy sigma_opt(beta)).
  static GainSchedule optimal_gain(double beta, double a, double T);
};

// Cost-to-go density of a simple feedback strategy:
//   phi(t, b) = ∫_t^T (1 + v²(tau)) · exp(2·∫_t^tau (a − b·v(s)) ds) dtau.
// Constant gain uses the closed form (1+alpha²)·(e^{lam·(T−t)}−1)/lam with
// lam = 2(a − b·alpha) (limit (1+alpha²)(T−t) at lam = 0). General schedules
// use nested adaptive quadrature: inner exponent to 1e-10 relative, outer to
// 1e-8. Throws overflow_error when the exponent exceeds double range; the
// caller decides whether +inf is an acceptable substitute.
double phi(double t, const GainSchedule& v, double a, double b);

// Expected cost of the simple feedback strategy with gain schedule v:
//   ECost = phi(0, b)·q0² + ∫₀ᵀ phi(t, b) dt.
double ecost_simple_feedback(const GainSchedule& v, double a, double b, double q0);

// Constant-gain upper bounds on ECost(CG(alpha), b):
//   a < b·alpha          → (q0² + T)(1 + alpha²)/|a − b·alpha|
//   alpha = 0 and a > 0  → (q0² + T)·e^{2aT}/(2a)
// Anything else is outside the proved hypotheses → hypothesis_error.
double cg_cost_bound(double alpha, double a, double b, double T, double q0);

// Regime-tagged lower bound on ECost_opt(b). cT is the caller-supplied
// absolute constant (the bound is stated up to c_T > 0 depending on T).
// kappa_floor carries the unconditional exact bound q0²·kappa(T, b; a),
// valid for every (a, b) independent of cT.
struct OptLowerBound {
  std::string regime;  // "|b|<=a*e^(-aT)", "a*e^(-aT)<=|b|<=a", "|b|>=a", "a<=1"
  double value;
  double kappa_floor;
};

OptLowerBound opt_lower_bound(double a, double b, double T, double q0, double cT);

// Mean and variance of X(t) = e^{−alpha·t}·q(t) − Q0 over Q0 = 0 dynamics
// dq = (alpha·q + beta)dt + dW:
//   E[X(t)] = beta·(1 − e^{−alpha·t})/alpha,  Var[X(t)] = (1 − e^{−2alpha·t})/(2alpha),
// with the alpha = 0 convention (1 − e^{−alpha·t})/alpha = t.
struct XMoments {
  double mean;
  double var;
};

XMoments x_process_moments(double alpha, double beta, double t);

// Reflection principle for the centered process X(t) − E[X(t)]:
//   Prob[ sup_{s ≤ t} (X(s) − E[X(s)]) ≥ M ] = 2·(1 − Phi(M/sigma_t)),
// sigma_t² = Var[X(t)]. Requires M > 0 and sigma_t > 0.
double reflection_sup_prob(double alpha, double t, double M);

}  // namespace aclab
