#pragma once

// Ensemble differential Riccati equation in reversed time tau = T - t:
//
//   dPi/dtau = Pi A + A^T Pi - Pi B B^T Pi + w Q_e^T Q_e,   Pi(0) = w P_e^T P_e
//
// with A = blkdiag(A_i), B the stacked input, w the ensemble output weight and
// Q_e, P_e block-diagonal copies of Q, P.

#include <cstddef>
#include <vector>

#include "enstrack/model.hpp"
#include "enstrack/types.hpp"

namespace enstrack {

class RiccatiTrajectory {
 public:
  RiccatiTrajectory(TimeGrid grid, std::size_t stride, std::vector<RowMatrix> samples);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(samples_.front().rows()); }

  /// Stored samples sit at tau-nodes 0, stride, 2*stride, ..., K.
  std::size_t stored() const noexcept { return samples_.size(); }
  std::size_t stored_node(std::size_t i) const noexcept { return i * stride_; }
  const RowMatrix& sample(std::size_t i) const { return samples_.at(i); }
  const std::vector<RowMatrix>& samples() const noexcept { return samples_; }

  const RowMatrix& initial() const noexcept { return samples_.front(); }
  const RowMatrix& terminal() const noexcept { return samples_.back(); }

  /// Exact sample on stored nodes, linear interpolation in between.
  Matrix eval(double tau) const;

 private:
  TimeGrid grid_;
  std::size_t stride_;
  std::vector<RowMatrix> samples_;
};

/// 1 for small systems, 50 (or the largest divisor of K not above it) once
/// the extended dimension exceeds 50.
std::size_t default_stride(std::size_t extended_dim, std::size_t steps);

RiccatiTrajectory solve_riccati(const EnsembleSystem& ens, const TimeGrid& grid,
                                std::size_t stride);

/// Right-hand side of the Riccati flow at Pi (dense).
Matrix riccati_rhs(const EnsembleSystem& ens, const Matrix& pi);

/// Frobenius norm of (central difference over adjacent stored nodes) - rhs.
double riccati_residual(const RiccatiTrajectory& traj, const EnsembleSystem& ens, double tau);

struct RiccatiInvariants {
  double max_asymmetry = 0.0;   // max ||Pi - Pi^T||_F / ||Pi||_F
  double min_eigen_ratio = 0.0; // min lambda_min(Pi) / ||Pi||_2
  std::size_t worst_sample = 0;
  bool ok = true;
};

RiccatiInvariants check_invariants(const RiccatiTrajectory& traj, double symmetry_tol = 1e-10,
                                   double psd_tol = 1e-8);

}  // namespace enstrack
