#include <gtest/gtest.h>

#include <cmath>

#include "enstrack/sim.hpp"

using namespace enstrack;

namespace {

ParameterFamily osc() {
  Matrix q(1, 2);
  q << std::sqrt(10.0), 0.0;
  return oscillator_family(q, Matrix::Identity(2, 2));
}

Vector y0_osc() {
  Vector y(2);
  y << 1.0, 0.0;
  return y;
}

TargetSignal osc_target(const TimeGrid& grid, double sigma = 1.0) {
  return TargetSignal::from_dynamics(osc().a(scalar_parameter(sigma)), y0_osc(), grid);
}

std::shared_ptr<GainSchedule> zero_schedule(const TimeGrid& grid, std::size_t n, std::size_t m) {
  auto s = std::make_shared<GainSchedule>(grid);
  s->members = 1;
  s->state_dim = n;
  s->input_dim = m;
  s->gains.assign(grid.steps() + 1, Matrix::Zero(m, n));
  s->offsets.assign(grid.steps() + 1, Vector::Zero(m));
  return s;
}

// Fine classical RK4 for y' = A y.
Vector open_loop(const Matrix& a, Vector y, double horizon, std::size_t steps) {
  const double h = horizon / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector k1 = a * y, k2 = a * (y + 0.5 * h * k1), k3 = a * (y + 0.5 * h * k2),
                 k4 = a * (y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

}  // namespace

TEST(ClosedLoop, FixedPointWhenTargetIsReachable) {
  const TimeGrid grid(5.0, 500);
  const auto g = osc_target(grid, 0.5);
  const auto training = ParameterEnsemble::scalars(std::vector<double>{0.5});
  const auto syn = solve_offset_and_gains(build_ensemble(osc(), training), grid, g, 1);
  const auto traj = simulate_closed_loop(osc(), scalar_parameter(0.5), make_feedback(syn.schedule),
                                         g, y0_osc(), grid);
  for (std::size_t k = 0; k <= 500; ++k) {
    EXPECT_LE((traj.states[k] - g.value(k)).norm(), 1e-8);
    EXPECT_LE(traj.controls[k].norm(), 1e-8);
  }
}

TEST(ClosedLoop, ZeroLawIsOpenLoop) {
  const TimeGrid grid(5.0, 500);
  const AffineFeedbackLaw law(zero_schedule(grid, 2, 1), "zero");
  const auto traj = simulate_closed_loop(osc(), scalar_parameter(-0.3), law,
                                         TargetSignal::zero(2, grid), y0_osc(), grid);
  const Matrix a = osc().a(scalar_parameter(-0.3));
  for (std::size_t k : {100u, 500u}) {
    EXPECT_LE((traj.states[k] - open_loop(a, y0_osc(), grid.node(k), 20 * k)).norm(), 1e-9);
  }
}

TEST(Extended, ZeroStateStaysZero) {
  const TimeGrid grid(2.0, 100);
  const auto ens = build_ensemble(osc(), ParameterEnsemble::symmetric_grid(1.0, 3));
  const auto g = TargetSignal::zero(2, grid);
  const auto syn = solve_offset_and_gains(ens, grid, g, 1);
  const auto traj = simulate_extended(ens, *syn.schedule, residual_forcing(ens, g), g,
                                      Vector::Zero(2), grid);
  for (std::size_t k = 0; k <= 100; ++k) {
    EXPECT_EQ(traj.states[k].norm(), 0.0);
    EXPECT_EQ(traj.controls[k].norm(), 0.0);
  }
  EXPECT_EQ(optimal_cost_formula(*syn.schedule, Vector::Zero(2)), 0.0);
}

TEST(Extended, SingletonMatchesClosedLoop) {
  const TimeGrid grid(5.0, 500);
  const auto g = osc_target(grid);
  const auto ens = build_ensemble(osc(), ParameterEnsemble::scalars(std::vector<double>{-1.5}));
  const auto syn = solve_offset_and_gains(ens, grid, g, 1);
  const auto ext = simulate_extended(ens, *syn.schedule, residual_forcing(ens, g), g,
                                      y0_osc() - g.value(0), grid);
  const auto cl = simulate_closed_loop(osc(), scalar_parameter(-1.5), make_feedback(syn.schedule), g,
                                       y0_osc(), grid);
  for (std::size_t k = 0; k <= 500; ++k) {
    EXPECT_LE((ext.states[k] - cl.states[k]).norm(), 1e-10 * (1 + cl.states[k].norm()));
  }
}

TEST(Extended, CostMatchesFormula) {
  const TimeGrid grid(5.0, 5000);
  const auto g = osc_target(grid);
  const auto ens = build_ensemble(osc(), ParameterEnsemble::symmetric_grid(2.0, 5));
  const auto syn = solve_offset_and_gains(ens, grid, g, 1);
  const auto ext = simulate_extended(ens, *syn.schedule, residual_forcing(ens, g), g,
                                      y0_osc() - g.value(0), grid);
  const double sim = evaluate_cost(ext, g, osc().q(), osc().p()).total();
  const double formula = optimal_cost_formula(*syn.schedule, y0_osc() - g.value(0));
  EXPECT_LE(std::abs(sim - formula) / formula, 1e-3);
}

TEST(Cost, ZeroWhenOnTarget) {
  const TimeGrid grid(1.0, 10);
  const auto g = osc_target(grid);
  ControlledTrajectory t{grid, {}, {}, scalar_parameter(1.0), "x", 1, 1.0};
  for (std::size_t k = 0; k <= 10; ++k) {
    t.states.push_back(g.value(k));
    t.controls.push_back(Vector::Zero(1));
  }
  const auto c = evaluate_cost(t, g, osc().q(), osc().p());
  EXPECT_EQ(c.tracking, 0.0);
  EXPECT_EQ(c.control, 0.0);
  EXPECT_EQ(c.terminal, 0.0);
  EXPECT_EQ(c.total(), 0.0);
}

TEST(Cost, ConstantOffset) {
  const TimeGrid grid(3.0, 30);
  Vector d(2);
  d << 0.5, -2.0;
  ControlledTrajectory t{grid, {}, {}, scalar_parameter(0.0), "x", 1, 1.0};
  for (std::size_t k = 0; k <= 30; ++k) {
    t.states.push_back(d);
    t.controls.push_back(Vector::Zero(1));
  }
  const auto c = evaluate_cost(t, TargetSignal::zero(2, grid), Matrix::Identity(2, 2),
                               Matrix::Identity(2, 2));
  EXPECT_NEAR(c.tracking, 3.0 * d.squaredNorm() / 2, 1e-12);
  EXPECT_EQ(c.control, 0.0);
  EXPECT_NEAR(c.terminal, d.squaredNorm() / 2, 1e-15);
}

TEST(Cost, FormulaVanishesWithoutWeights) {
  const TimeGrid grid(2.0, 100);
  const auto fam = oscillator_family(Matrix::Zero(1, 2), Matrix::Zero(2, 2));
  const auto ens = build_ensemble(fam, ParameterEnsemble::symmetric_grid(1.0, 3));
  const auto syn = solve_offset_and_gains(ens, grid, osc_target(grid), 1);
  EXPECT_EQ(optimal_cost_formula(*syn.schedule, y0_osc()), 0.0);
}

TEST(Cost, ScalarValueFunction) {
  const TimeGrid grid(2.0, 2000);
  const EnsembleSystem ens({Matrix::Zero(1, 1)}, Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                           Matrix::Zero(1, 1), 1.0);
  const auto syn = solve_offset_and_gains(ens, grid, TargetSignal::zero(1, grid), 1);
  EXPECT_NEAR(optimal_cost_formula(*syn.schedule, Vector::Ones(1)), 0.5 * std::tanh(2.0), 1e-10);
}

TEST(SingleOptimal, ReachableTargetCostsNothing) {
  const TimeGrid grid(5.0, 500);
  const auto g = osc_target(grid, 2.0);
  const auto s = solve_single_optimal(osc(), scalar_parameter(2.0), g, y0_osc(), grid);
  EXPECT_LE(s.cost.total(), 1e-16);
  for (const auto& u : s.trajectory.controls) EXPECT_LE(u.norm(), 1e-8);
}

TEST(SingleOptimal, BeatsTheEnsembleLaw) {
  const TimeGrid grid(5.0, 2000);
  const auto g = osc_target(grid);
  const auto ens = build_ensemble(osc(), ParameterEnsemble::symmetric_grid(2.0, 5));
  const auto law = make_feedback(solve_offset_and_gains(ens, grid, g, 1).schedule);
  for (double sigma : {-4.0, 0.8, 4.0}) {
    const auto s = solve_single_optimal(osc(), scalar_parameter(sigma), g, y0_osc(), grid);
    const auto applied =
        evaluate_cost(simulate_closed_loop(osc(), scalar_parameter(sigma), law, g, y0_osc(), grid),
                      g, osc().q(), osc().p());
    EXPECT_LE(s.cost.total(), applied.total() * (1 + 1e-9)) << "sigma = " << sigma;
  }
}

TEST(ClosedLoop, RejectsMismatchedGrids) {
  const TimeGrid grid(1.0, 10), other(1.0, 20);
  const AffineFeedbackLaw law(zero_schedule(grid, 2, 1), "zero");
  EXPECT_THROW(simulate_closed_loop(osc(), scalar_parameter(0.0), law, TargetSignal::zero(2, other),
                                    y0_osc(), other),
               DimensionError);
}
