#pragma once

// Affine tracking feedback u(t, z) = -(G(T - t) z + o(t)) on the tracking
// error z = y - g, with G(tau) = B^T Pi(tau) E and o(t) = B^T h(t).

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "enstrack/model.hpp"
#include "enstrack/riccati.hpp"
#include "enstrack/types.hpp"

namespace enstrack {

/// Target g and its derivative, sampled on the half-step lattice t_j = j*dt/2
/// (2K+1 samples) so that Runge-Kutta stage times hit stored values.
class TargetSignal {
 public:
  enum class Source { analytic, finite_difference };

  /// g' = A g, g(0) = y0, propagated with the exact flow of A.
  static TargetSignal from_dynamics(const Matrix& a, const Vector& y0, const TimeGrid& grid);
  /// Node samples (K+1); derivatives by second-order differences, midpoints
  /// by cubic Hermite interpolation.
  static TargetSignal from_samples(const std::vector<Vector>& nodes, const TimeGrid& grid);
  static TargetSignal zero(std::size_t dim, const TimeGrid& grid);

  /// Same signal in coordinates scaled componentwise by d.
  TargetSignal scaled(const Vector& d) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.front().size()); }
  Source source() const noexcept { return source_; }

  const Vector& value(std::size_t k) const { return values_.at(2 * k); }
  const Vector& rate(std::size_t k) const { return rates_.at(2 * k); }
  const Vector& half_value(std::size_t j) const { return values_.at(j); }
  const Vector& half_rate(std::size_t j) const { return rates_.at(j); }

 private:
  TargetSignal(TimeGrid grid, std::vector<Vector> values, std::vector<Vector> rates, Source src);

  TimeGrid grid_;
  std::vector<Vector> values_;
  std::vector<Vector> rates_;
  Source source_;
};

/// f = A E g - E g' on the half-step lattice.
class Forcing {
 public:
  Forcing(TimeGrid grid, std::vector<Vector> half);
  const TimeGrid& grid() const noexcept { return grid_; }
  const Vector& node(std::size_t k) const { return half_.at(2 * k); }
  const std::vector<Vector>& half() const noexcept { return half_; }
  bool is_zero() const;

 private:
  TimeGrid grid_;
  std::vector<Vector> half_;
};

Forcing residual_forcing(const EnsembleSystem& ens, const TargetSignal& g);

struct GainSchedule {
  explicit GainSchedule(TimeGrid g) : grid(g) {}

  TimeGrid grid;
  std::size_t members = 0;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  double output_weight = 1.0;
  std::vector<Matrix> gains;  // G(tau_k), m x n, k = 0..K (reversed time)
  std::vector<Matrix> bt_pi;  // B^T Pi(tau_k), m x Nn
  std::vector<Vector> offsets;  // o(t_k), k = 0..K (forward time)
  RowMatrix pi_terminal;        // Pi(T)
  Vector h0;                    // h(0)
  double offset_integral = 0.0; // int_0^T <h,f> - |B^T h|^2/2 dt

  Matrix gain_at(double tau) const;
  Vector offset_at(double t) const;
};

struct Synthesis {
  RiccatiTrajectory riccati;
  std::shared_ptr<const GainSchedule> schedule;
};

Synthesis solve_offset_and_gains(const EnsembleSystem& ens, const TimeGrid& grid,
                                 const TargetSignal& g, std::size_t stride);

class AffineFeedbackLaw {
 public:
  AffineFeedbackLaw(std::shared_ptr<const GainSchedule> schedule, std::string id);

  const std::string& id() const noexcept { return id_; }
  const GainSchedule& schedule() const noexcept { return *schedule_; }
  double horizon() const noexcept { return schedule_->grid.horizon(); }
  std::size_t state_dim() const noexcept { return schedule_->state_dim; }
  std::size_t input_dim() const noexcept { return schedule_->input_dim; }

  Vector operator()(double t, const Vector& z) const;
  /// Law at forward node t_k.
  Vector at_node(std::size_t k, const Vector& z) const;
  /// Law at t_k + dt/2 (linear interpolation of the schedule).
  Vector at_midpoint(std::size_t k, const Vector& z) const;

  Matrix gain(double t) const { return schedule_->gain_at(horizon() - t); }
  Vector offset(double t) const { return schedule_->offset_at(t); }

 private:
  std::shared_ptr<const GainSchedule> schedule_;
  std::string id_;
};

AffineFeedbackLaw make_feedback(std::shared_ptr<const GainSchedule> schedule,
                                std::string id = "ensemble");

enum class Convention { unit, paper_literal };

std::string_view to_string(Convention c) noexcept;
Convention parse_convention(std::string_view text);

/// Feedback for the single mean parameter of the training ensemble. UNIT uses
/// Q^T Q and P^T P; PAPER_LITERAL scales both by 1/N (N = training count).
AffineFeedbackLaw make_averaged_feedback(const ParameterFamily& family,
                                         const ParameterEnsemble& training,
                                         const TargetSignal& g, const TimeGrid& grid,
                                         Convention convention);

}  // namespace enstrack
