#pragma once

// Diagnostics around the ensemble feedback: order independence, suboptimality
// gaps against the extended optimum and the known-parameter optimum, and
// sweeps over the uncertainty level ell.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enstrack/feedback.hpp"
#include "enstrack/model.hpp"
#include "enstrack/sim.hpp"

namespace enstrack {

/// `count` standard-normal n-vectors from (seed, stream 0), followed by the
/// tracking errors y_k - g_k of `traj` if given.
std::vector<Vector> make_probes(std::size_t n, std::size_t count, std::uint64_t seed,
                                const ControlledTrajectory* traj = nullptr,
                                const TargetSignal* g = nullptr);

/// max over forward nodes t_k and probes z of |a(t_k,z) - b(t_k,z)| / (1 + |z|).
double law_difference(const AffineFeedbackLaw& a, const AffineFeedbackLaw& b,
                      const std::vector<Vector>& probes);

double permutation_invariance_gap(const ParameterFamily& family, const ParameterEnsemble& sigma,
                                  std::span<const std::size_t> permutation,
                                  const TargetSignal& g, const TimeGrid& grid,
                                  const std::vector<Vector>& probes);

struct GapReport {
  double gap = 0.0;
  double left = 0.0;
  double right = 0.0;
  double delta_norm = 0.0;
  Vector sigma;

  double scale() const noexcept;
  /// gap >= -tol * (1 + |left| + |right|)
  bool nonnegative(double tol = 1e-9) const noexcept;
};

/// Ensemble feedback plus, optionally, its extended optimal closed loop.
struct EnsemblePipeline {
  EnsembleSystem system;
  Synthesis synthesis;
  AffineFeedbackLaw law;
  std::optional<ControlledTrajectory> extended;
  CostBreakdown extended_cost;
};

EnsemblePipeline build_pipeline(const ParameterFamily& family, const ParameterEnsemble& training,
                                const TargetSignal& g, const Vector& y0, const TimeGrid& grid,
                                std::size_t stride, bool with_extended);

struct Suboptimality {
  GapReport ensemble_vs_lifted;  // J_ext(E x_{Sigma,sigma}) - J_ext(optimal)
  GapReport single_vs_applied;   // J_sigma(K_Sigma) - J_sigma(optimal)
  double state_gap = 0.0;        // sup_t |x_Sigma(t) - E x_{Sigma,sigma}(t)|
  double control_gap = 0.0;      // sup_t |u_Sigma(t) - u_{Sigma,sigma}(t)|
  CostBreakdown applied_cost;
  CostBreakdown single_cost;
};

Suboptimality suboptimality_gaps(const EnsemblePipeline& pipeline, const ParameterFamily& family,
                                 const ParameterEnsemble& training, const Vector& sigma,
                                 const TargetSignal& g, const Vector& y0, const TimeGrid& grid);

Suboptimality suboptimality_gaps(const ParameterFamily& family, const ParameterEnsemble& training,
                                 const Vector& sigma, const TargetSignal& g, const Vector& y0,
                                 const TimeGrid& grid);

struct SweepSpec {
  std::vector<double> ells;
  std::function<ParameterEnsemble(double)> training;
  std::function<ParameterEnsemble(double)> test;
  std::vector<Convention> conventions{Convention::unit};
  bool single_optimal_rows = true;
  bool gaps = true;
  std::optional<double> trajectory_ell;  // keep trajectories for this ell
  bool check_invariants = true;
  std::size_t stride = 1;
  std::size_t threads = 1;
};

struct SweepRow {
  std::size_t ell_index = 0;
  double ell = 0.0;
  std::size_t test_id = 0;
  Vector sigma;
  std::string feedback;    // ensemble | averaged | single-optimal
  std::string convention;  // averaged rows only
  CostBreakdown cost;
  std::string error;
};

struct GapRow {
  std::size_t ell_index = 0;
  double ell = 0.0;
  std::size_t test_id = 0;
  Vector sigma;
  Suboptimality gaps;
  std::string error;
};

struct TrajectoryRecord {
  double ell = 0.0;
  std::size_t test_id = 0;
  std::string feedback;
  std::string convention;
  ControlledTrajectory trajectory;
};

struct SweepTable {
  std::vector<SweepRow> costs;
  std::vector<GapRow> gaps;
  std::vector<TrajectoryRecord> trajectories;
  /// Riccati invariant checks of every ensemble synthesis, one per ell.
  std::vector<RiccatiInvariants> invariants;
};

SweepTable uncertainty_sweep(const ParameterFamily& family, const SweepSpec& spec,
                             const TargetSignal& g, const Vector& y0, const TimeGrid& grid);

/// Least-squares slope of log(y) against log(x); all values must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace enstrack
