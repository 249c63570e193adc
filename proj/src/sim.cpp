#include "enstrack/sim.hpp"

#include <string>

#include "flow.hpp"

namespace enstrack {
namespace {

void check_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grids differ");
}

double trapezoid(const std::vector<double>& v, double h) {
  if (v.empty()) return 0.0;
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t k = 1; k + 1 < v.size(); ++k) acc += v[k];
  return acc * h;
}

}  // namespace

ControlledTrajectory simulate_closed_loop(const ParameterFamily& family, const Vector& sigma,
                                          const AffineFeedbackLaw& law, const TargetSignal& g,
                                          const Vector& y0, const TimeGrid& grid) {
  check_grid(law.schedule().grid, grid, "closed loop");
  check_grid(g.grid(), grid, "closed loop");
  if (law.state_dim() != family.state_dim() || g.dim() != family.state_dim() ||
      static_cast<std::size_t>(y0.size()) != family.state_dim()) {
    throw DimensionError("closed loop: law, target, initial state and family disagree");
  }
  const Matrix a = family.a(sigma);
  const Matrix& b = family.b();
  const auto flow = detail::make_block_flow(a, grid.dt());
  const std::size_t steps = grid.steps();
  const double h = grid.dt();

  auto forcing = [&](std::size_t j) -> Vector { return a * g.half_value(j) - g.half_rate(j); };

  ControlledTrajectory out{grid, {}, {}, sigma, law.id(), 1, 1.0};
  out.states.reserve(steps + 1);
  out.controls.reserve(steps + 1);

  Vector x = y0 - g.value(0);
  Vector av, bv, s, k1, k2, k3, k4;
  for (std::size_t k = 0;; ++k) {
    if (!x.allFinite()) throw DivergenceError("closed loop state is non-finite", k);
    const Vector u = law.at_node(k, x);
    out.states.push_back(x + g.value(k));
    out.controls.push_back(u);
    if (k == steps) break;

    k1 = b * u + forcing(2 * k);
    av.noalias() = flow.half * x;
    s = x + 0.5 * h * k1;
    bv.noalias() = flow.half * s;
    k2 = b * law.at_midpoint(k, bv) + forcing(2 * k + 1);
    s = av + 0.5 * h * k2;
    k3 = b * law.at_midpoint(k, s) + forcing(2 * k + 1);
    s = av + h * k3;
    Vector u4 = flow.half * s;
    k4 = b * law.at_node(k + 1, u4) + forcing(2 * k + 2);
    s = av + (bv - av) / 3.0 + (h / 3.0) * (k2 + k3);
    x.noalias() = flow.half * s;
    x += (h / 6.0) * k4;
  }
  return out;
}

ControlledTrajectory simulate_extended(const EnsembleSystem& ens, const GainSchedule& sched,
                                       const Forcing& forcing, const TargetSignal& g,
                                       const Vector& x0, const TimeGrid& grid) {
  check_grid(sched.grid, grid, "extended run");
  check_grid(forcing.grid(), grid, "extended run");
  check_grid(g.grid(), grid, "extended run");
  if (sched.members != ens.members() || sched.state_dim != ens.state_dim()) {
    throw DimensionError("extended run: schedule was built for a different ensemble");
  }
  if (sched.bt_pi.size() != grid.steps() + 1) {
    throw Error("extended run: schedule has no Riccati samples at every node");
  }
  const auto flow = detail::make_ensemble_flow(ens.blocks(), grid.dt());
  const Matrix b_stack = ens.stacked_b();
  const std::size_t steps = grid.steps();
  const double h = grid.dt();
  const auto n = static_cast<Eigen::Index>(ens.state_dim());
  const std::size_t count = ens.members();

  // u(t_k + theta dt) from the schedule, linear in theta between nodes.
  auto control = [&](std::size_t k, double theta, const Vector& x) -> Vector {
    const std::size_t tk = steps - k;
    if (theta == 0.0) return -(sched.bt_pi[tk] * x + sched.offsets[k]);
    if (theta == 1.0) return -(sched.bt_pi[tk - 1] * x + sched.offsets[k + 1]);
    const Vector a = sched.bt_pi[tk] * x + sched.offsets[k];
    const Vector c = sched.bt_pi[tk - 1] * x + sched.offsets[k + 1];
    return -((1.0 - theta) * a + theta * c);
  };

  ControlledTrajectory out{grid, {}, {}, Vector(), "extended-optimal", count,
                           ens.output_weight()};
  out.states.reserve(steps + 1);
  out.controls.reserve(steps + 1);

  auto lift = [&](const Vector& x, std::size_t k) {
    Vector y = x;
    for (std::size_t i = 0; i < count; ++i) {
      y.segment(static_cast<Eigen::Index>(i) * n, n) += g.value(k);
    }
    return y;
  };

  Vector x = extend(x0, count);
  Vector av, bv, s, u4, k1, k2, k3, k4;
  for (std::size_t k = 0;; ++k) {
    if (!x.allFinite()) throw DivergenceError("extended state is non-finite", k);
    const Vector u = control(k, 0.0, x);
    out.states.push_back(lift(x, k));
    out.controls.push_back(u);
    if (k == steps) break;

    const auto& f = forcing.half();
    k1 = b_stack * u + f[2 * k];
    detail::apply_blocks(flow.blocks, false, false, x, av);
    s = x + 0.5 * h * k1;
    detail::apply_blocks(flow.blocks, false, false, s, bv);
    k2 = b_stack * control(k, 0.5, bv) + f[2 * k + 1];
    s = av + 0.5 * h * k2;
    k3 = b_stack * control(k, 0.5, s) + f[2 * k + 1];
    s = av + h * k3;
    detail::apply_blocks(flow.blocks, false, false, s, u4);
    k4 = b_stack * control(k, 1.0, u4) + f[2 * k + 2];
    s = av + (bv - av) / 3.0 + (h / 3.0) * (k2 + k3);
    detail::apply_blocks(flow.blocks, false, false, s, x);
    x += (h / 6.0) * k4;
  }
  return out;
}

CostBreakdown evaluate_cost(const ControlledTrajectory& traj, const TargetSignal& g,
                            const Matrix& q, const Matrix& p) {
  check_grid(traj.grid, g.grid(), "cost");
  const std::size_t steps = traj.grid.steps();
  if (traj.states.size() != steps + 1 || traj.controls.size() != steps + 1) {
    throw DimensionError("cost: trajectory does not cover the grid");
  }
  const auto n = static_cast<Eigen::Index>(g.dim());
  if (traj.states.front().size() != n * static_cast<Eigen::Index>(traj.members)) {
    throw DimensionError("cost: state dimension does not match the target");
  }
  auto weighted = [&](const Matrix& w, const Vector& y, std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.members; ++i) {
      acc += (w * (y.segment(static_cast<Eigen::Index>(i) * n, n) - g.value(k))).squaredNorm();
    }
    return traj.output_weight * acc;
  };
  std::vector<double> track(steps + 1), ctrl(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    track[k] = weighted(q, traj.states[k], k);
    ctrl[k] = traj.controls[k].squaredNorm();
  }
  CostBreakdown c;
  c.tracking = 0.5 * trapezoid(track, traj.grid.dt());
  c.control = 0.5 * trapezoid(ctrl, traj.grid.dt());
  c.terminal = 0.5 * weighted(p, traj.states.back(), steps);
  return c;
}

double optimal_cost_formula(const GainSchedule& sched, const Vector& x0) {
  if (sched.h0.size() == 0 || sched.pi_terminal.size() == 0) {
    throw Error("cost formula: schedule carries no terminal data");
  }
  const Vector ex = extend(x0, sched.members);
  return 0.5 * ex.dot(sched.pi_terminal * ex) + sched.h0.dot(ex) + sched.offset_integral;
}

SingleOptimal solve_single_optimal(const ParameterFamily& family, const Vector& sigma,
                                   const TargetSignal& g, const Vector& y0,
                                   const TimeGrid& grid) {
  const EnsembleSystem ens = build_ensemble(family, ParameterEnsemble({sigma}));
  auto synth = solve_offset_and_gains(ens, grid, g, grid.steps());
  AffineFeedbackLaw law(std::move(synth.schedule), "single-optimal");
  auto traj = simulate_closed_loop(family, sigma, law, g, y0, grid);
  const auto cost = evaluate_cost(traj, g, family.q(), family.p());
  return SingleOptimal{std::move(traj), cost, std::move(law)};
}

}  // namespace enstrack
