#include "aclab/sde.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "aclab/errors.hpp"
#include "aclab/io.hpp"
#include "aclab/strategy.hpp"

namespace aclab {

namespace {

// Max |alpha_eff|·dt per step while the position is in a transient; one step
// then changes the deterministic part by a factor within [e^{-1/16}, e^{1/16}],
// which keeps threshold monitoring and the left-endpoint cost quadrature
// honest regardless of how stiff the closed loop is.
constexpr double kEta = 1.0 / 16.0;

double expm1_over(double x) {
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

// Transition coefficients for one (alpha, dt) pair:
//   q' = E·q + F·drive + S·z,  E = e^{alpha·dt}, F = (E−1)/alpha, S = sqrt(var).
// Laws hold alpha/dt constant for long stretches, so a one-entry cache removes
// nearly all exp() calls from the hot loop.
struct StepCoefs {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double dt = std::numeric_limits<double>::quiet_NaN();
  double E = 0.0;
  double F = 0.0;
  double S = 0.0;

  void refresh(double alpha_in, double dt_in) {
    alpha = alpha_in;
    dt = dt_in;
    const double x = alpha_in * dt_in;
    E = std::exp(x);
    F = dt_in * expm1_over(x);
    S = std::sqrt(dt_in * expm1_over(2.0 * x));
    if (!std::isfinite(E) || !std::isfinite(F) || !std::isfinite(S)) {
      std::ostringstream os;
      os << "ou step coefficients overflowed: alpha = " << alpha_in
         << ", dt = " << dt_in;
      throw overflow_error(os.str());
    }
  }
};

void validate_run(const ProblemDynamics& dyn, const StrategyBlueprint& bp,
                  const SimGrid& grid) {
  if (!std::isfinite(dyn.a) || !std::isfinite(dyn.b) ||
      !std::isfinite(dyn.T) || !std::isfinite(dyn.q0)) {
    throw domain_error("simulate: non-finite dynamics parameters");
  }
  if (!(dyn.T > 0.0)) {
    throw domain_error("simulate: T = " + std::to_string(dyn.T) +
                       " must be > 0");
  }
  if (!(grid.dt_base > 0.0) || !(grid.dt_testing > 0.0) ||
      !(grid.dt_testing <= grid.dt_base) || !(grid.dt_base <= dyn.T)) {
    std::ostringstream os;
    os << "simulate: grid must satisfy 0 < dt_testing <= dt_base <= T, got "
       << "dt_base = " << grid.dt_base << ", dt_testing = " << grid.dt_testing
       << ", T = " << dyn.T;
    throw grid_error(os.str());
  }
  if (grid.t_end != dyn.T) {
    throw grid_error("simulate: grid.t_end = " + std::to_string(grid.t_end) +
                     " differs from the dynamics horizon T = " +
                     std::to_string(dyn.T));
  }
  if (bp.a != dyn.a || bp.T != dyn.T || bp.q0 != dyn.q0) {
    std::ostringstream os;
    os << "simulate: blueprint built for (a, T, q0) = (" << bp.a << ", "
       << bp.T << ", " << bp.q0 << ") but dynamics have (" << dyn.a << ", "
       << dyn.T << ", " << dyn.q0 << ")";
    throw domain_error(os.str());
  }
}

// Records nothing; simulate_path_cost instantiates the loop with this.
struct CostOnlyRecorder {
  void begin(const std::string&, double) {}
  void step(double, double, double) {}
  void event(double, const std::string&, double) {}
  void finish(double) {}
};

struct FullRecorder {
  TrajectoryLog log;

  void begin(const std::string& tag, double q0) {
    log.times.push_back(0.0);
    log.positions.push_back(q0);
    log.events.push_back(Event{0.0, tag, q0});
  }
  void step(double t, double q, double u) {
    log.controls.push_back(u);
    log.times.push_back(t);
    log.positions.push_back(q);
  }
  void event(double t, const std::string& tag, double q) {
    log.events.push_back(Event{t, tag, q});
  }
  void finish(double cost) {
    if (!log.controls.empty()) log.controls.push_back(log.controls.back());
    log.cost = cost;
  }
};

template <class Recorder>
double run_path(const ProblemDynamics& dyn, const StrategyBlueprint& bp,
                const SimGrid& grid, NoiseSource& noise, Recorder& rec) {
  PathController ctl(bp);
  const double T = dyn.T;
  // Stability caps never go below this; astronomically stiff loops then
  // overflow visibly instead of stalling the walltime.
  const double dt_cap_floor = 2e-12 * T;

  double t = 0.0;
  double q = dyn.q0;
  double cost = 0.0;

  rec.begin(ctl.state_tag(), q);

  // Interior grid times are anchor + k·dt (a single multiplication), so runs
  // at dt and dt/2 share bit-identical grid points between re-anchors; the
  // anchor moves only when the spacing changes or a deadline was landed on.
  double anchor = 0.0;
  double dt_cur = 0.0;
  long long k = 0;
  bool on_grid = false;

  StepCoefs coefs;

  while (t < T) {
    const StepLaw law = ctl.law(t, q);
    const double u = law.g * q + law.h;
    if (!std::isfinite(u)) {
      std::ostringstream os;
      os << "strategy produced non-finite control u at t = " << t
         << ", q = " << q << ", state = " << ctl.state_tag();
      throw strategy_error(os.str());
    }
    const double alpha = dyn.a + dyn.b * law.g;
    const double drive = dyn.b * law.h;

    double dt_pref = law.testing ? grid.dt_testing : grid.dt_base;
    if (alpha > 0.0) {
      dt_pref = std::min(dt_pref, std::max(kEta / alpha, dt_cap_floor));
    } else if (alpha < 0.0) {
      // A stable loop needs small steps only during the transient; once q sits
      // inside the stationary band, the exact transition is unbiased at any dt.
      const double m_st = -drive / alpha;
      const double sigma_st = std::sqrt(-0.5 / alpha);
      if (std::abs(q - m_st) > 3.0 * sigma_st) {
        dt_pref = std::min(dt_pref, std::max(-kEta / alpha, dt_cap_floor));
      }
    }

    if (!on_grid || dt_pref != dt_cur) {
      anchor = t;
      k = 0;
      dt_cur = dt_pref;
      on_grid = true;
    }

    const double deadline = std::min(law.deadline, T);
    double t_next = anchor + static_cast<double>(k + 1) * dt_cur;
    bool landed = false;
    if (t_next >= deadline) {
      t_next = deadline;
      landed = true;
    }
    const double dt = t_next - t;
    if (!(dt > 0.0)) {
      std::ostringstream os;
      os << "step collapsed: t = " << t << ", deadline = " << deadline
         << ", dt = " << dt << ", state = " << ctl.state_tag();
      throw grid_error(os.str());
    }

    if (alpha != coefs.alpha || dt != coefs.dt) coefs.refresh(alpha, dt);

    cost += (q * q + u * u) * dt;

    const double z = noise.next_normal();
    q = coefs.E * q + coefs.F * drive + coefs.S * z;
    if (!std::isfinite(q) || !std::isfinite(cost)) {
      std::ostringstream os;
      os << "state overflowed double range at t = " << t_next << " (q = " << q
         << ", cost = " << cost << ", alpha = " << alpha << ")";
      throw overflow_error(os.str());
    }

    t = t_next;
    if (landed) {
      on_grid = false;
    } else {
      ++k;
    }

    rec.step(t, q, u);
    if (t < T) {
      if (auto tag = ctl.observe(t, q)) rec.event(t, *tag, q);
    }
  }

  rec.finish(cost);
  return cost;
}

}  // namespace

StepMoments ou_step_moments(double q, double alpha, double drive, double dt) {
  if (!std::isfinite(q) || !std::isfinite(alpha) || !std::isfinite(drive) ||
      !std::isfinite(dt)) {
    throw domain_error("ou_step_moments: non-finite input");
  }
  if (!(dt > 0.0)) {
    throw domain_error("ou_step_moments: dt = " + std::to_string(dt) +
                       " must be > 0");
  }
  const double x = alpha * dt;
  StepMoments m;
  m.mean = std::exp(x) * q + drive * dt * expm1_over(x);
  m.variance = dt * expm1_over(2.0 * x);
  if (!std::isfinite(m.mean) || !std::isfinite(m.variance)) {
    std::ostringstream os;
    os << "ou_step_moments: overflow at alpha = " << alpha << ", dt = " << dt
       << ", q = " << q << ", drive = " << drive;
    throw overflow_error(os.str());
  }
  return m;
}

double ou_exact_step(double q, double alpha, double drive, double dt,
                     double z) {
  const StepMoments m = ou_step_moments(q, alpha, drive, dt);
  return m.mean + std::sqrt(m.variance) * z;
}

TrajectoryLog simulate_controlled_path(const ProblemDynamics& dyn,
                                       const StrategyBlueprint& blueprint,
                                       const SimGrid& grid, NoiseSource noise) {
  validate_run(dyn, blueprint, grid);
  FullRecorder rec;
  run_path(dyn, blueprint, grid, noise, rec);
  return std::move(rec.log);
}

double simulate_path_cost(const ProblemDynamics& dyn,
                          const StrategyBlueprint& blueprint,
                          const SimGrid& grid, NoiseSource noise) {
  validate_run(dyn, blueprint, grid);
  CostOnlyRecorder rec;
  return run_path(dyn, blueprint, grid, noise, rec);
}

double accumulate_cost(const TrajectoryLog& log) {
  const std::size_t n = log.times.size();
  if (n < 1 || log.positions.size() != n || log.controls.size() != n) {
    throw schema_error(
        "accumulate_cost: times/positions/controls must be parallel arrays");
  }
  double cost = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = log.times[i + 1] - log.times[i];
    if (!(dt > 0.0)) {
      throw schema_error("accumulate_cost: times must be strictly increasing");
    }
    const double q = log.positions[i];
    const double u = log.controls[i];
    cost += (q * q + u * u) * dt;
  }
  return cost;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  const std::size_t n = log.times.size();
  if (log.positions.size() != n || log.controls.size() != n) {
    throw schema_error(
        "write_trajectory_csv: times/positions/controls must be parallel");
  }
  os << "t,q,u,event\n";
  std::size_t ev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    os << num17(log.times[i]) << ',' << num17(log.positions[i]) << ','
       << num17(log.controls[i]) << ',';
    if (ev < log.events.size() && log.events[ev].t == log.times[i]) {
      const std::string& tag = log.events[ev].tag;
      if (tag.find_first_of(",\"\n") == std::string::npos) {
        os << tag;
      } else {
        os << '"';
        for (char ch : tag) {
          if (ch == '"') os << '"';
          os << ch;
        }
        os << '"';
      }
      ++ev;
    }
    os << '\n';
  }
}

}  // namespace aclab
