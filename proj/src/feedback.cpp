#include "enstrack/feedback.hpp"

#include <string>

#include "flow.hpp"
#include "riccati_flow.hpp"

namespace enstrack {

TargetSignal::TargetSignal(TimeGrid grid, std::vector<Vector> values, std::vector<Vector> rates,
                           Source src)
    : grid_(grid), values_(std::move(values)), rates_(std::move(rates)), source_(src) {
  const std::size_t expected = 2 * grid_.steps() + 1;
  if (values_.size() != expected || rates_.size() != expected) {
    throw DimensionError("target: expected " + std::to_string(expected) + " half-step samples");
  }
  for (std::size_t j = 0; j < expected; ++j) {
    if (!values_[j].allFinite() || !rates_[j].allFinite()) {
      throw DivergenceError("target has non-finite samples", j / 2);
    }
  }
}

TargetSignal TargetSignal::from_dynamics(const Matrix& a, const Vector& y0, const TimeGrid& grid) {
  if (a.rows() != a.cols() || a.rows() != y0.size()) {
    throw DimensionError("target: generator and initial state disagree");
  }
  const auto flow = detail::make_block_flow(a, grid.dt());
  const std::size_t count = 2 * grid.steps() + 1;
  std::vector<Vector> values(count), rates(count);
  values[0] = y0;
  for (std::size_t j = 1; j < count; ++j) values[j].noalias() = flow.half * values[j - 1];
  for (std::size_t j = 0; j < count; ++j) rates[j].noalias() = a * values[j];
  return TargetSignal(grid, std::move(values), std::move(rates), Source::analytic);
}

TargetSignal TargetSignal::from_samples(const std::vector<Vector>& nodes, const TimeGrid& grid) {
  const std::size_t steps = grid.steps();
  if (nodes.size() != steps + 1) {
    throw DimensionError("target: expected " + std::to_string(steps + 1) + " node samples, got " +
                         std::to_string(nodes.size()));
  }
  const double h = grid.dt();
  std::vector<Vector> d(steps + 1);
  d[0] = (-3.0 * nodes[0] + 4.0 * nodes[1] - nodes[2]) / (2.0 * h);
  d[steps] = (3.0 * nodes[steps] - 4.0 * nodes[steps - 1] + nodes[steps - 2]) / (2.0 * h);
  for (std::size_t k = 1; k < steps; ++k) d[k] = (nodes[k + 1] - nodes[k - 1]) / (2.0 * h);

  std::vector<Vector> values(2 * steps + 1), rates(2 * steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    values[2 * k] = nodes[k];
    rates[2 * k] = d[k];
  }
  for (std::size_t k = 0; k < steps; ++k) {
    values[2 * k + 1] = 0.5 * (nodes[k] + nodes[k + 1]) + (h / 8.0) * (d[k] - d[k + 1]);
    rates[2 * k + 1] = (1.5 / h) * (nodes[k + 1] - nodes[k]) - 0.25 * (d[k] + d[k + 1]);
  }
  return TargetSignal(grid, std::move(values), std::move(rates), Source::finite_difference);
}

TargetSignal TargetSignal::zero(std::size_t dim, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(dim);
  std::vector<Vector> values(2 * grid.steps() + 1, Vector::Zero(n));
  auto rates = values;
  return TargetSignal(grid, std::move(values), std::move(rates), Source::analytic);
}

TargetSignal TargetSignal::scaled(const Vector& d) const {
  if (static_cast<std::size_t>(d.size()) != dim()) throw DimensionError("target: scale length");
  std::vector<Vector> values(values_.size()), rates(rates_.size());
  for (std::size_t j = 0; j < values_.size(); ++j) {
    values[j] = values_[j].cwiseProduct(d);
    rates[j] = rates_[j].cwiseProduct(d);
  }
  return TargetSignal(grid_, std::move(values), std::move(rates), source_);
}

Forcing::Forcing(TimeGrid grid, std::vector<Vector> half) : grid_(grid), half_(std::move(half)) {
  if (half_.size() != 2 * grid_.steps() + 1) throw DimensionError("forcing: wrong sample count");
}

bool Forcing::is_zero() const {
  for (const auto& v : half_) {
    if (!v.isZero(0.0)) return false;
  }
  return true;
}

Forcing residual_forcing(const EnsembleSystem& ens, const TargetSignal& g) {
  if (g.dim() != ens.state_dim()) {
    throw DimensionError("forcing: target dimension " + std::to_string(g.dim()) +
                         " does not match the state dimension " +
                         std::to_string(ens.state_dim()));
  }
  const std::size_t count = 2 * g.grid().steps() + 1;
  const auto n = static_cast<Eigen::Index>(ens.state_dim());
  std::vector<Vector> half(count);
  for (std::size_t j = 0; j < count; ++j) {
    Vector f(n * static_cast<Eigen::Index>(ens.members()));
    for (std::size_t i = 0; i < ens.members(); ++i) {
      f.segment(static_cast<Eigen::Index>(i) * n, n).noalias() =
          ens.block(i) * g.half_value(j) - g.half_rate(j);
    }
    half[j] = std::move(f);
  }
  return Forcing(g.grid(), std::move(half));
}

Matrix GainSchedule::gain_at(double tau) const {
  const auto [k, frac] = grid.locate(tau);
  if (frac == 0.0) return gains[k];
  if (frac == 1.0) return gains[k + 1];
  return (1.0 - frac) * gains[k] + frac * gains[k + 1];
}

Vector GainSchedule::offset_at(double t) const {
  const auto [k, frac] = grid.locate(t);
  if (frac == 0.0) return offsets[k];
  if (frac == 1.0) return offsets[k + 1];
  return (1.0 - frac) * offsets[k] + frac * offsets[k + 1];
}

Synthesis solve_offset_and_gains(const EnsembleSystem& ens, const TimeGrid& grid,
                                 const TargetSignal& g, std::size_t stride) {
  if (!(g.grid() == grid)) throw DimensionError("synthesis: target grid differs from the grid");
  if (stride == 0 || grid.steps() % stride != 0) {
    throw RangeError("synthesis: stride " + std::to_string(stride) + " does not divide K = " +
                     std::to_string(grid.steps()));
  }
  const Forcing forcing = residual_forcing(ens, g);
  const std::size_t steps = grid.steps();
  const auto n = static_cast<Eigen::Index>(ens.state_dim());
  const Matrix b_stack = ens.stacked_b();

  auto sched = std::make_shared<GainSchedule>(grid);
  sched->members = ens.members();
  sched->state_dim = ens.state_dim();
  sched->input_dim = ens.input_dim();
  sched->output_weight = ens.output_weight();
  sched->gains.resize(steps + 1);
  sched->bt_pi.resize(steps + 1);
  sched->offsets.resize(steps + 1);

  std::vector<double> integrand(steps + 1, 0.0);
  std::vector<RowMatrix> samples;
  samples.reserve(steps / stride + 1);

  detail::run_riccati_flow(ens, grid, &forcing.half(), [&](const detail::FlowNode& node) {
    const std::size_t k = node.k;
    Matrix bt_pi = node.pi_b.transpose();
    Matrix gain = Matrix::Zero(bt_pi.rows(), n);
    for (std::size_t i = 0; i < ens.members(); ++i) {
      gain += bt_pi.middleCols(static_cast<Eigen::Index>(i) * n, n);
    }
    sched->gains[k] = std::move(gain);
    sched->bt_pi[k] = std::move(bt_pi);

    const Vector& hv = *node.h;
    Vector o = b_stack.transpose() * hv;
    const std::size_t t_index = steps - k;
    integrand[t_index] = hv.dot(forcing.node(t_index)) - 0.5 * o.squaredNorm();
    sched->offsets[t_index] = std::move(o);

    if (k % stride == 0) samples.push_back(node.pi);
    if (k == steps) {
      sched->pi_terminal = node.pi;
      sched->h0 = hv;
    }
  });

  double acc = 0.5 * (integrand.front() + integrand.back());
  for (std::size_t k = 1; k < steps; ++k) acc += integrand[k];
  sched->offset_integral = acc * grid.dt();

  return Synthesis{RiccatiTrajectory(grid, stride, std::move(samples)), std::move(sched)};
}

AffineFeedbackLaw::AffineFeedbackLaw(std::shared_ptr<const GainSchedule> schedule, std::string id)
    : schedule_(std::move(schedule)), id_(std::move(id)) {
  if (!schedule_ || schedule_->gains.empty()) throw Error("feedback: empty gain schedule");
}

Vector AffineFeedbackLaw::operator()(double t, const Vector& z) const {
  if (static_cast<std::size_t>(z.size()) != state_dim()) {
    throw DimensionError("feedback: state has dimension " + std::to_string(z.size()));
  }
  return -(gain(t) * z + offset(t));
}

Vector AffineFeedbackLaw::at_node(std::size_t k, const Vector& z) const {
  const auto& s = *schedule_;
  const std::size_t steps = s.grid.steps();
  return -(s.gains[steps - k] * z + s.offsets[k]);
}

Vector AffineFeedbackLaw::at_midpoint(std::size_t k, const Vector& z) const {
  const auto& s = *schedule_;
  const std::size_t steps = s.grid.steps();
  const Matrix g = 0.5 * (s.gains[steps - k] + s.gains[steps - k - 1]);
  const Vector o = 0.5 * (s.offsets[k] + s.offsets[k + 1]);
  return -(g * z + o);
}

AffineFeedbackLaw make_feedback(std::shared_ptr<const GainSchedule> schedule, std::string id) {
  return AffineFeedbackLaw(std::move(schedule), std::move(id));
}

std::string_view to_string(Convention c) noexcept {
  return c == Convention::unit ? "unit" : "paper-literal";
}

Convention parse_convention(std::string_view text) {
  if (text == "unit") return Convention::unit;
  if (text == "paper-literal" || text == "paper_literal") return Convention::paper_literal;
  throw ConfigError("unknown convention '" + std::string(text) +
                    "' (expected unit or paper-literal)");
}

AffineFeedbackLaw make_averaged_feedback(const ParameterFamily& family,
                                         const ParameterEnsemble& training,
                                         const TargetSignal& g, const TimeGrid& grid,
                                         Convention convention) {
  const ParameterEnsemble mean({training.mean()});
  const double weight =
      convention == Convention::unit ? 1.0 : 1.0 / static_cast<double>(training.size());
  const EnsembleSystem ens = build_ensemble(family, mean).with_output_weight(weight);
  auto synth = solve_offset_and_gains(ens, grid, g, grid.steps());
  return AffineFeedbackLaw(std::move(synth.schedule),
                           "averaged-" + std::string(to_string(convention)));
}

}  // namespace enstrack
