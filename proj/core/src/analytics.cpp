#include "aclab/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "aclab/errors.hpp"
#include "aclab/rng.hpp"

namespace aclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

void require_finite(double x, const char* name, const char* where) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << where << ": " << name << " = " << x << " is not finite";
    throw domain_error(os.str());
  }
}

// ∫ f over [lo, hi], adaptive Gauss-Kronrod with the given relative tolerance.
template <class F>
double integrate(F&& f, double lo, double hi, double rel_tol, const char* where) {
  if (hi <= lo) return 0.0;
  double err = 0.0;
  const double val = GK::integrate(std::forward<F>(f), lo, hi, 15, rel_tol, &err);
  if (std::isnan(val)) {
    std::ostringstream os;
    os << where << ": quadrature over [" << lo << ", " << hi << "] returned NaN";
    throw numeric_error(os.str());
  }
  return val;
}

// expm1(x)/x with the removable singularity at x = 0 filled in.
double expm1_over(double x) {
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

}  // namespace

double kappa(const KappaInput& in) {
  require_finite(in.t, "t", "kappa");
  require_finite(in.beta, "beta", "kappa");
  require_finite(in.a, "a", "kappa");
  if (in.t < 0) {
    throw domain_error("kappa: t = " + std::to_string(in.t) + " is negative");
  }
  const double a = in.a;
  const double beta = in.beta;
  if (a == 0.0 && beta == 0.0) return in.t;

  const double rho = std::hypot(a, beta);
  const double x = in.t * rho;
  const double th = std::tanh(x);
  if (a <= 0.0) {
    // Denominator rho − a·tanh ≥ rho > 0: no cancellation possible.
    return th / (rho - a * th);
  }
  // a > 0: rho − a·tanh(x) = beta²/(rho+a) + 2a·e^{−2x}/(1+e^{−2x}).
  const double e2 = std::exp(-2.0 * x);
  const double den = beta * beta / (rho + a) + 2.0 * a * e2 / (1.0 + e2);
  if (den < 0.0) {
    std::ostringstream os;
    os << "kappa: denominator " << den << " < 0 for t=" << in.t
       << " beta=" << beta << " a=" << a;
    throw numeric_error(os.str());
  }
  if (den == 0.0) return kInf;  // beta = 0 and e^{-2x} underflowed
  return th / den;
}

double ecost_opt(double a, double b, double T, double q0) {
  require_finite(a, "a", "ecost_opt");
  require_finite(b, "b", "ecost_opt");
  require_finite(T, "T", "ecost_opt");
  require_finite(q0, "q0", "ecost_opt");
  if (T <= 0) {
    throw domain_error("ecost_opt: T = " + std::to_string(T) + " must be > 0");
  }
  const double kT = kappa(T, b, a);
  if (!std::isfinite(kT)) return kInf;
  const double integral = integrate([&](double t) { return kappa(t, b, a); }, 0.0,
                                    T, 1e-10, "ecost_opt");
  return kT * q0 * q0 + integral;
}

GainSchedule GainSchedule::constant_gain(double alpha, double T) {
  GainSchedule g;
  g.v = [alpha](double) { return alpha; };
  g.T = T;
  g.constant = alpha;
  return g;
}

GainSchedule GainSchedule::optimal_gain(double beta, double a, double T) {
  GainSchedule g;
  g.v = [beta, a, T](double t) { return beta * kappa(T - t, beta, a); };
  g.T = T;
  g.constant.reset();
  if (beta == 0.0) g.constant = 0.0;  // 0·kappa ≡ 0 for every a
  return g;
}

namespace {

// Closed form for constant gain alpha:
//   phi(t) = (1+alpha²)·(e^{lam·s} − 1)/lam,  s = T − t,  lam = 2(a − b·alpha).
double phi_const(double s, double alpha, double a, double b) {
  const double lam = 2.0 * (a - b * alpha);
  const double one_a2 = 1.0 + alpha * alpha;
  const double ls = lam * s;
  if (ls > 709.0) {
    std::ostringstream os;
    os << "phi: exponent 2(a - b*alpha)*(T-t) = " << ls
       << " overflows (alpha=" << alpha << " a=" << a << " b=" << b << ")";
    throw overflow_error(os.str());
  }
  return one_a2 * s * expm1_over(ls);
}

}  // namespace

double phi(double t, const GainSchedule& v, double a, double b) {
  require_finite(t, "t", "phi");
  require_finite(a, "a", "phi");
  require_finite(b, "b", "phi");
  if (!(v.T > 0) || !std::isfinite(v.T)) {
    throw domain_error("phi: schedule horizon T = " + std::to_string(v.T) +
                       " must be positive and finite");
  }
  if (t < 0 || t > v.T) {
    throw domain_error("phi: t = " + std::to_string(t) + " outside [0, T]");
  }
  if (v.constant) return phi_const(v.T - t, *v.constant, a, b);

  // General schedule. Write the inner exponent as J(tau) − J(t) with
  // J(x) = ∫₀ˣ (a − b·v), so each J needs one adaptive pass instead of one
  // pass per outer node.
  auto J = [&](double x) {
    return integrate([&](double s) { return a - b * v.v(s); }, 0.0, x, 1e-10,
                     "phi inner");
  };
  const double Jt = J(t);
  auto integrand = [&](double tau) {
    const double ex = 2.0 * (J(tau) - Jt);
    if (ex > 709.0) {
      throw overflow_error("phi: inner exponent " + std::to_string(ex) +
                           " overflows");
    }
    const double vv = v.v(tau);
    return (1.0 + vv * vv) * std::exp(ex);
  };
  return integrate(integrand, t, v.T, 1e-8, "phi outer");
}

double ecost_simple_feedback(const GainSchedule& v, double a, double b, double q0) {
  require_finite(q0, "q0", "ecost_simple_feedback");
  const double p0 = phi(0.0, v, a, b);
  const double integral = integrate([&](double t) { return phi(t, v, a, b); },
                                    0.0, v.T, 1e-8, "ecost_simple_feedback");
  return p0 * q0 * q0 + integral;
}

double cg_cost_bound(double alpha, double a, double b, double T, double q0) {
  require_finite(alpha, "alpha", "cg_cost_bound");
  require_finite(a, "a", "cg_cost_bound");
  require_finite(b, "b", "cg_cost_bound");
  require_finite(T, "T", "cg_cost_bound");
  require_finite(q0, "q0", "cg_cost_bound");
  if (T <= 0) {
    throw domain_error("cg_cost_bound: T = " + std::to_string(T) + " must be > 0");
  }
  const double q0T = q0 * q0 + T;
  if (a < b * alpha) {
    return q0T * (1.0 + alpha * alpha) / std::abs(a - b * alpha);
  }
  if (alpha == 0.0 && a > 0.0) {
    const double ex = 2.0 * a * T;
    if (ex > 709.0) {
      throw overflow_error("cg_cost_bound: e^{2aT} overflows, 2aT = " +
                           std::to_string(ex));
    }
    return q0T * std::exp(ex) / (2.0 * a);
  }
  std::ostringstream os;
  os << "cg_cost_bound: no bound proved for alpha=" << alpha << " a=" << a
     << " b=" << b << " (need a < b*alpha, or alpha=0 with a > 0)";
  throw hypothesis_error(os.str());
}

OptLowerBound opt_lower_bound(double a, double b, double T, double q0, double cT) {
  require_finite(a, "a", "opt_lower_bound");
  require_finite(b, "b", "opt_lower_bound");
  require_finite(T, "T", "opt_lower_bound");
  require_finite(q0, "q0", "opt_lower_bound");
  require_finite(cT, "cT", "opt_lower_bound");
  if (T <= 0 || cT <= 0) {
    throw domain_error("opt_lower_bound: need T > 0 and cT > 0");
  }
  OptLowerBound out;
  out.kappa_floor = q0 * q0 * kappa(T, b, a);
  const double q2 = cT * q0 * q0;
  const double ab = std::abs(b);
  if (a >= 1.0) {
    const double edge = a * std::exp(-a * T);
    if (ab <= edge) {
      out.regime = "|b|<=a*e^(-aT)";
      // e^{2aT}/a in log space; overflow reported, not saturated.
      const double ex = 2.0 * a * T - std::log(a);
      if (ex > 709.0) {
        throw overflow_error("opt_lower_bound: e^{2aT}/a overflows, log = " +
                             std::to_string(ex));
      }
      out.value = q2 * std::exp(ex);
    } else if (ab <= a) {
      out.regime = "a*e^(-aT)<=|b|<=a";
      out.value = q2 * a / (b * b);
    } else {
      out.regime = "|b|>=a";
      out.value = q2 / ab;
    }
  } else {
    out.regime = "a<=1";
    out.value = q2 / (1.0 + std::abs(a) + ab);
  }
  return out;
}

XMoments x_process_moments(double alpha, double beta, double t) {
  require_finite(alpha, "alpha", "x_process_moments");
  require_finite(beta, "beta", "x_process_moments");
  require_finite(t, "t", "x_process_moments");
  if (t < 0) {
    throw domain_error("x_process_moments: t = " + std::to_string(t) +
                       " is negative");
  }
  // (1 − e^{−alpha·t})/alpha = t·expm1(−alpha·t)/(−alpha·t), removable at 0.
  XMoments m;
  m.mean = beta * t * expm1_over(-alpha * t);
  m.var = t * expm1_over(-2.0 * alpha * t);
  return m;
}

double reflection_sup_prob(double alpha, double t, double M) {
  require_finite(M, "M", "reflection_sup_prob");
  if (M <= 0) {
    throw domain_error("reflection_sup_prob: M = " + std::to_string(M) +
                       " must be > 0");
  }
  const XMoments m = x_process_moments(alpha, 0.0, t);
  if (!(m.var > 0)) {
    throw domain_error("reflection_sup_prob: Var[X(t)] = " +
                       std::to_string(m.var) + " is degenerate (t = " +
                       std::to_string(t) + ")");
  }
  return 2.0 * normal_upper_tail(M / std::sqrt(m.var));
}

}  // namespace aclab
