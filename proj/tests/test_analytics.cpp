#include <cmath>
#include <limits>
#include <vector>

#include "aclab/analytics.hpp"
#include "aclab/errors.hpp"
#include "doctest.h"

using namespace aclab;

namespace {
// Frozen reference values, evaluated independently at 40-digit precision.
constexpr double kTanh1 = 0.7615941559557649;          // tanh(1)
constexpr double kOneMinusExpM2 = 0.8646647167633873;  // 1 - e^-2
constexpr double kESquared = 7.38905609893065;         // e^2
constexpr double kKappa_2_3_m1 = 0.24025190135039245;  // kappa(2,3;-1)
constexpr double kEcostOpt_1_0 = 4.291792074197987;    // ecost_opt(1,0,1,1)
constexpr double kEcostOpt_1_1 = 2.4786349854525334;   // ecost_opt(1,1,1,1)
constexpr double kEcostSfCg1 = 1.4323323583816936;     // CG(1) cost at a=0,b=1,q0=1
constexpr double kRefl_0_1_1 = 0.3173105078629141;     // 2(1-Phi(1))
constexpr double kRefl_1_1_1 = 0.1282933112836635;
constexpr double kReflM2 = 0.6923830881673918;         // alpha=-2,t=.5,M=.5
}  // namespace

TEST_SUITE("analytics") {

TEST_CASE("kappa pinned values") {
  CHECK(kappa(1.0, 0.0, 0.0) == 1.0);             // t when a = beta = 0
  CHECK(kappa(0.0, 7.0, -3.0) == 0.0);            // tanh(0) = 0
  CHECK(kappa(1.0, 1.0, 0.0) == doctest::Approx(kTanh1).epsilon(1e-15));
  CHECK(kappa(2.0, 3.0, -1.0) == doctest::Approx(kKappa_2_3_m1).epsilon(1e-14));
}

TEST_CASE("kappa is nonnegative on the parameter box") {
  // t in [0,10], |beta| <= 1e3, |a| <= 1e2. +inf (overflow for beta=0, a>0,
  // t large) counts as nonnegative.
  const std::vector<double> ts = {0.0, 1e-6, 0.1, 1.0, 3.7, 10.0};
  const std::vector<double> betas = {0.0, 1e-3, 0.5, 1.0, 31.0, 1000.0};
  const std::vector<double> as = {-100.0, -7.0, -0.5, 0.0, 0.5, 7.0, 100.0};
  for (double t : ts)
    for (double beta : betas)
      for (double a : as) {
        for (double sb : {-1.0, 1.0}) {
          const double k = kappa(t, sb * beta, a);
          CHECK(k >= 0.0);
        }
      }
}

TEST_CASE("kappa overflow convention returns +inf") {
  // beta = 0, a > 0: kappa = (e^{2at} - 1)/(2a) in the limit; for a*t huge
  // the denominator underflows and the kernel is beyond double range.
  CHECK(kappa(400.0, 0.0, 2.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("ecost_opt pinned values and evenness") {
  CHECK(ecost_opt(0.0, 0.0, 1.0, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ecost_opt(0.0, 0.0, 1.0, 2.0) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(ecost_opt(1.0, 0.0, 1.0, 1.0) ==
        doctest::Approx(kEcostOpt_1_0).epsilon(1e-12));
  CHECK(ecost_opt(1.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(kEcostOpt_1_1).epsilon(1e-10));
  // Even in b, bitwise: beta enters through beta^2 only.
  for (double a : {-5.0, 0.0, 3.0})
    for (double b : {0.25, 1.0, 8.0})
      CHECK(ecost_opt(a, b, 1.0, 1.0) == ecost_opt(a, -b, 1.0, 1.0));
}

TEST_CASE("ecost_opt lower bound by its kappa summand") {
  for (double a : {-5.0, 0.0, 1.0, 3.0})
    for (double b : {0.0, 0.5, 2.0}) {
      const double full = ecost_opt(a, b, 1.0, 1.3);
      const double floor = 1.3 * 1.3 * kappa(1.0, b, a);
      CHECK(full >= floor);
    }
}

TEST_CASE("phi pinned values") {
  const GainSchedule v0 = GainSchedule::constant_gain(0.0, 1.0);
  CHECK(phi(0.0, v0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(phi(0.25, v0, 0.0, 0.0) == doctest::Approx(0.75).epsilon(1e-12));

  const GainSchedule v1 = GainSchedule::constant_gain(1.0, 1.0);
  CHECK(phi(0.0, v1, 0.0, 1.0) ==
        doctest::Approx(kOneMinusExpM2).epsilon(1e-12));
  // a = b*alpha: zero exponent, phi = (1+alpha^2)(T-t).
  CHECK(phi(0.25, v1, 2.0, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("phi closed form matches quadrature for constant gains") {
  for (double alpha : {0.0, 1.0, -1.0, 2.5})
    for (double a : {-3.0, 0.0, 1.5})
      for (double b : {-2.0, 0.0, 1.0}) {
        GainSchedule closed = GainSchedule::constant_gain(alpha, 1.0);
        GainSchedule quad = closed;
        quad.constant.reset();  // forces the nested-quadrature path
        for (double t : {0.0, 0.3, 0.9}) {
          const double c = phi(t, closed, a, b);
          const double q = phi(t, quad, a, b);
          CHECK(c == doctest::Approx(q).epsilon(1e-8));
        }
      }
}

TEST_CASE("phi overflow raises") {
  const GainSchedule v0 = GainSchedule::constant_gain(0.0, 1.0);
  CHECK_THROWS_AS(phi(0.0, v0, 400.0, 0.0), overflow_error);
}

TEST_CASE("ecost_simple_feedback pinned values") {
  const GainSchedule v0 = GainSchedule::constant_gain(0.0, 1.0);
  CHECK(ecost_simple_feedback(v0, 0.0, 5.0, 1.0) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ecost_simple_feedback(v0, 0.0, 1.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));

  const GainSchedule v1 = GainSchedule::constant_gain(1.0, 1.0);
  CHECK(ecost_simple_feedback(v1, 0.0, 1.0, 1.0) ==
        doctest::Approx(kEcostSfCg1).epsilon(1e-10));
}

TEST_CASE("optimal gain schedule reproduces ecost_opt") {
  for (double a : {-2.0, 0.0, 1.0})
    for (double beta : {0.5, 1.0, 3.0}) {
      const GainSchedule v = GainSchedule::optimal_gain(beta, a, 1.0);
      const double via_sf = ecost_simple_feedback(v, a, beta, 1.0);
      const double direct = ecost_opt(a, beta, 1.0, 1.0);
      CHECK(via_sf == doctest::Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("sigma_opt minimizes over the simple-feedback battery") {
  // Optimality: every gain schedule in the battery costs at least
  // ecost_opt (up to quadrature slack).
  const double T = 1.0, q0 = 1.0;
  for (double a : {-2.0, 0.0, 1.5})
    for (double b : {0.0, 0.7, 2.0}) {
      const double opt = ecost_opt(a, b, T, q0);
      for (double alpha : {0.0, 0.5, 1.0, -1.0, 2.0}) {
        const GainSchedule v = GainSchedule::constant_gain(alpha, T);
        const double c = ecost_simple_feedback(v, a, b, q0);
        CHECK(c >= opt * (1.0 - 1e-6));
      }
      for (double beta : {0.3, 1.0, 4.0}) {
        const GainSchedule v = GainSchedule::optimal_gain(beta, a, T);
        const double c = ecost_simple_feedback(v, a, b, q0);
        CHECK(c >= opt * (1.0 - 1e-6));
      }
    }
}

TEST_CASE("cg_cost_bound pinned values") {
  CHECK(cg_cost_bound(1.0, 0.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cg_cost_bound(1.0, 0.0, 2.0, 1.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cg_cost_bound(0.0, 1.0, 0.5, 1.0, 1.0) ==
        doctest::Approx(kESquared).epsilon(1e-12));
  // Outside the proved hypotheses: a = b*alpha with alpha != 0 (zero
  // closed-loop rate, neither case applies).
  CHECK_THROWS_AS(cg_cost_bound(1.0, 2.0, 2.0, 1.0, 1.0), hypothesis_error);
}

TEST_CASE("opt_lower_bound regime routing") {
  {
    const OptLowerBound lb = opt_lower_bound(10.0, 20.0, 1.0, 1.0, 1.0);
    CHECK(lb.regime == "|b|>=a");
    CHECK(lb.value == doctest::Approx(1.0 / 20.0).epsilon(1e-12));
  }
  {
    const double b = 10.0 * std::exp(-10.0) * 0.5;
    const OptLowerBound lb = opt_lower_bound(10.0, b, 1.0, 1.0, 1.0);
    CHECK(lb.regime == "|b|<=a*e^(-aT)");
    CHECK(lb.value == doctest::Approx(std::exp(20.0) / 10.0).epsilon(1e-12));
  }
  {
    const OptLowerBound lb = opt_lower_bound(0.5, 1.0, 1.0, 1.0, 1.0);
    CHECK(lb.regime == "a<=1");
    CHECK(lb.value == doctest::Approx(1.0 / 2.5).epsilon(1e-12));
  }
  // kappa_floor is the exact summand bound for every regime.
  for (double a : {0.5, 10.0})
    for (double b : {0.1, 20.0}) {
      const OptLowerBound lb = opt_lower_bound(a, b, 1.0, 1.0, 1.0);
      CHECK(lb.kappa_floor == doctest::Approx(kappa(1.0, b, a)).epsilon(1e-14));
      CHECK(ecost_opt(a, b, 1.0, 1.0) >= lb.kappa_floor);
    }
}

TEST_CASE("ecost_opt is non-increasing in |b| at a=10 past the dead zone") {
  // Qualitative shape of the known-b cost: larger |b| never hurts once
  // |b| >= a*e^{-aT}.
  const double a = 10.0, T = 1.0, q0 = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double logb = std::log10(a * std::exp(-a * T));
       logb <= std::log10(1000.0 * a) + 1e-9; logb += 0.25) {
    const double cur = ecost_opt(a, std::pow(10.0, logb), T, q0);
    CHECK(cur <= prev * (1.0 + 1e-9));
    prev = cur;
  }
}

TEST_CASE("x_process_moments pinned values") {
  {
    const XMoments m = x_process_moments(0.0, 2.0, 1.0);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.var == doctest::Approx(1.0).epsilon(1e-15));
  }
  {
    const XMoments m = x_process_moments(1.0, 0.0, 100.0);
    CHECK(m.mean == 0.0);
    CHECK(m.var == doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    const XMoments m = x_process_moments(-1.0, 1.0, 1.0);
    CHECK(m.mean == doctest::Approx(1.7182818284590453).epsilon(1e-14));
    CHECK(m.var == doctest::Approx(3.194528049465325).epsilon(1e-14));
  }
}

TEST_CASE("reflection_sup_prob pinned values") {
  CHECK(reflection_sup_prob(0.0, 1.0, 1.0) ==
        doctest::Approx(kRefl_0_1_1).epsilon(1e-13));
  CHECK(reflection_sup_prob(1.0, 1.0, 1.0) ==
        doctest::Approx(kRefl_1_1_1).epsilon(1e-13));
  CHECK(reflection_sup_prob(-2.0, 0.5, 0.5) ==
        doctest::Approx(kReflM2).epsilon(1e-13));
  // M -> 0+ saturates at 1.
  CHECK(reflection_sup_prob(0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(reflection_sup_prob(0.0, 1.0, 0.0), domain_error);
}

}  // TEST_SUITE
