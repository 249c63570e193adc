#pragma once

#include <string>
#include <vector>

#include "enstrack/feedback.hpp"
#include "enstrack/model.hpp"
#include "enstrack/types.hpp"

namespace enstrack {

struct ControlledTrajectory {
  TimeGrid grid;
  std::vector<Vector> states;    // y_k (n) or stacked member states (Nn)
  std::vector<Vector> controls;  // u_k (m)
  Vector sigma;                  // test parameter; empty for extended runs
  std::string feedback;
  std::size_t members = 1;       // > 1 for extended runs
  double output_weight = 1.0;    // weight of the Q/P terms in the objective
};

struct CostBreakdown {
  double tracking = 0.0;
  double control = 0.0;
  double terminal = 0.0;
  double total() const noexcept { return tracking + control + terminal; }
};

/// y' = A(sigma) y + B u, u = law(t, y - g), integrated in the error
/// coordinates x = y - g.
ControlledTrajectory simulate_closed_loop(const ParameterFamily& family, const Vector& sigma,
                                          const AffineFeedbackLaw& law, const TargetSignal& g,
                                          const Vector& y0, const TimeGrid& grid);

/// Optimal closed loop of the extended system from x(0) = E x0, with
/// u = -B^T (Pi(T - t) x + h(t)). x0 is the initial tracking error y0 - g(0);
/// stored states are member outputs x + E g.
ControlledTrajectory simulate_extended(const EnsembleSystem& ens, const GainSchedule& sched,
                                       const Forcing& forcing, const TargetSignal& g,
                                       const Vector& x0, const TimeGrid& grid);

/// Trapezoid quadrature on the trajectory grid; member terms weighted by the
/// trajectory's output weight for extended runs.
CostBreakdown evaluate_cost(const ControlledTrajectory& traj, const TargetSignal& g,
                            const Matrix& q, const Matrix& p);

double optimal_cost_formula(const GainSchedule& sched, const Vector& x0);

struct SingleOptimal {
  ControlledTrajectory trajectory;
  CostBreakdown cost;
  AffineFeedbackLaw law;
};

SingleOptimal solve_single_optimal(const ParameterFamily& family, const Vector& sigma,
                                   const TargetSignal& g, const Vector& y0, const TimeGrid& grid);

}  // namespace enstrack
