#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aclab/rng.hpp"

namespace aclab {

struct StrategyBlueprint;  // strategy.hpp

// One control instance: dq = (a·q + b·u)dt + dW on [0, T], q(0) = q0.
// b is hidden from strategies; it enters only the dynamics update.
struct ProblemDynamics {
  double a;   // drift gain (1/time)
  double b;   // control gain (1/time), unknown to the controller
  double T;   // horizon (> 0)
  double q0;  // initial position; |q0| ≥ 1 required when simulating BR
};

// Step-size policy. Steps never cross strategy deadlines or T: the step taken
// is min(current dt, time to the next scheduled deadline). dt_testing applies
// inside BR Testing Subepochs; everywhere else dt_base.
struct SimGrid {
  double dt_base;
  double dt_testing;
  double t_end;  // horizon copy; must equal the dynamics horizon
};

// Epoch-transition marker. q is the position at the transition grid point.
struct Event {
  double t;
  std::string tag;
  double q;
};

// One simulated path. times/positions have N+1 entries, controls[i] is the
// value held on [times[i], times[i+1]) with controls[N] = controls[N-1] so the
// arrays stay parallel. cost is the left-endpoint quadrature of q² + u²,
// bit-reproducible from (times, positions, controls).
struct TrajectoryLog {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> controls;
  std::vector<Event> events;
  double cost = 0.0;
};

// Exact transition moments of dq = (alpha·q + drive)dt + dW over dt:
//   mean = e^{alpha·dt}·q + drive·(e^{alpha·dt} − 1)/alpha   (alpha=0: q + drive·dt)
//   var  = (e^{2·alpha·dt} − 1)/(2·alpha)                    (alpha=0: dt)
struct StepMoments {
  double mean;
  double variance;
};

StepMoments ou_step_moments(double q, double alpha, double drive, double dt);

// Samples the exact Gaussian transition: mean + sqrt(variance)·z.
double ou_exact_step(double q, double alpha, double drive, double dt, double z);

// Runs one path of `blueprint` against `dyn`, consuming draws from `noise`.
// The controller is queried at each step start and its affine law is held for
// the step; threshold predicates are evaluated at every grid point, the first
// grid time satisfying one is the recorded stopping time. Terminates exactly
// at T.
TrajectoryLog simulate_controlled_path(const ProblemDynamics& dyn,
                                       const StrategyBlueprint& blueprint,
                                       const SimGrid& grid, NoiseSource noise);

// As above but returns only the accumulated cost (no per-step storage).
// This is the Monte Carlo workhorse.
double simulate_path_cost(const ProblemDynamics& dyn,
                          const StrategyBlueprint& blueprint,
                          const SimGrid& grid, NoiseSource noise);

// Left-endpoint quadrature of positions² + controls² over the log's grid.
// Recomputes the stored value bit-exactly.
double accumulate_cost(const TrajectoryLog& log);

// CSV dump with header `t,q,u,event`; floats with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);

}  // namespace aclab
