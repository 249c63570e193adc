#include "enstrack/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "riccati_flow.hpp"

namespace enstrack {

RiccatiTrajectory::RiccatiTrajectory(TimeGrid grid, std::size_t stride,
                                     std::vector<RowMatrix> samples)
    : grid_(grid), stride_(stride), samples_(std::move(samples)) {
  if (stride_ == 0 || grid_.steps() % stride_ != 0) {
    throw RangeError("riccati: stride must be positive and divide the step count");
  }
  if (samples_.size() != grid_.steps() / stride_ + 1) {
    throw DimensionError("riccati: expected " + std::to_string(grid_.steps() / stride_ + 1) +
                         " stored samples, got " + std::to_string(samples_.size()));
  }
}

Matrix RiccatiTrajectory::eval(double tau) const {
  auto [k, frac] = grid_.locate(tau);
  // Position in units of stored intervals.
  const double pos = (static_cast<double>(k) + frac) / static_cast<double>(stride_);
  auto i = static_cast<std::size_t>(std::floor(pos));
  double theta = pos - static_cast<double>(i);
  if (i >= samples_.size() - 1) {
    i = samples_.size() - 2;
    theta = 1.0;
  }
  if (theta == 0.0) return samples_[i];
  if (theta == 1.0) return samples_[i + 1];
  Matrix out = (1.0 - theta) * samples_[i] + theta * samples_[i + 1];
  return 0.5 * (out + out.transpose());
}

std::size_t default_stride(std::size_t extended_dim, std::size_t steps) {
  if (extended_dim <= 50) return 1;
  for (std::size_t s = 50; s > 1; --s) {
    if (steps % s == 0) return s;
  }
  return 1;
}

RiccatiTrajectory solve_riccati(const EnsembleSystem& ens, const TimeGrid& grid,
                                std::size_t stride) {
  if (stride == 0 || grid.steps() % stride != 0) {
    throw RangeError("riccati: stride " + std::to_string(stride) + " does not divide K = " +
                     std::to_string(grid.steps()));
  }
  std::vector<RowMatrix> samples;
  samples.reserve(grid.steps() / stride + 1);
  detail::run_riccati_flow(ens, grid, nullptr, [&](const detail::FlowNode& node) {
    if (node.k % stride == 0) samples.push_back(node.pi);
  });
  return RiccatiTrajectory(grid, stride, std::move(samples));
}

Matrix riccati_rhs(const EnsembleSystem& ens, const Matrix& pi) {
  const Matrix a = ens.dense_a();
  const Matrix b = ens.stacked_b();
  const auto n = static_cast<Eigen::Index>(ens.state_dim());
  Matrix c = Matrix::Zero(pi.rows(), pi.cols());
  const Matrix qq = ens.output_weight() * ens.q().transpose() * ens.q();
  for (std::size_t i = 0; i < ens.members(); ++i) {
    c.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) = qq;
  }
  const Matrix pb = pi * b;
  return pi * a + a.transpose() * pi - pb * pb.transpose() + c;
}

double riccati_residual(const RiccatiTrajectory& traj, const EnsembleSystem& ens, double tau) {
  const auto [k, frac] = traj.grid().locate(tau);
  std::size_t node = k;
  if (frac == 1.0) node = k + 1;
  else if (frac != 0.0) throw RangeError("riccati residual: tau is not a grid node");
  if (node % traj.stride() != 0) throw RangeError("riccati residual: tau is not a stored node");
  const std::size_t i = node / traj.stride();
  if (i == 0 || i + 1 >= traj.stored()) {
    throw RangeError("riccati residual: needs an interior stored node");
  }
  const double span = 2.0 * traj.grid().dt() * static_cast<double>(traj.stride());
  const Matrix diff = (traj.sample(i + 1) - traj.sample(i - 1)) / span;
  const Matrix rhs = riccati_rhs(ens, traj.sample(i));
  return (diff - rhs).norm();
}

RiccatiInvariants check_invariants(const RiccatiTrajectory& traj, double symmetry_tol,
                                   double psd_tol) {
  RiccatiInvariants out;
  out.min_eigen_ratio = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < traj.stored(); ++i) {
    const Matrix p = traj.sample(i);
    const double fro = p.norm();
    if (fro == 0.0) continue;
    const double asym = (p - p.transpose()).norm() / fro;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    const double spectral = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    const double ratio = ev(0) / spectral;
    out.max_asymmetry = std::max(out.max_asymmetry, asym);
    if (first || ratio < out.min_eigen_ratio) {
      out.min_eigen_ratio = ratio;
      out.worst_sample = i;
      first = false;
    }
  }
  out.ok = out.max_asymmetry <= symmetry_tol && out.min_eigen_ratio >= -psd_tol;
  return out;
}

}  // namespace enstrack
