#include "enstrack/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace enstrack {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / static_cast<double>(steps)) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw RangeError("time grid: horizon must be positive and finite");
  }
  if (steps < 2) throw RangeError("time grid: need at least 2 steps");
}

double TimeGrid::node(std::size_t k) const {
  if (k > steps_) throw RangeError("time grid: node index out of range");
  if (k == steps_) return horizon_;
  return static_cast<double>(k) * dt_;
}

std::pair<std::size_t, double> TimeGrid::locate(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw RangeError("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) +
                     "]");
  }
  const double x = t / dt_;
  auto k = static_cast<std::size_t>(std::floor(x));
  if (k >= steps_) return {steps_ - 1, 1.0};
  return {k, x - static_cast<double>(k)};
}

void LtiSystem::validate() const {
  const auto n = a.rows();
  if (a.cols() != n) throw DimensionError("system: A must be square");
  if (b.rows() != n) throw DimensionError("system: B must have as many rows as A");
  if (q.cols() != n) throw DimensionError("system: Q must have as many columns as A");
  if (p.cols() != n) throw DimensionError("system: P must have as many columns as A");
  if (!a.allFinite() || !b.allFinite() || !q.allFinite() || !p.allFinite()) {
    throw Error("system: non-finite entries");
  }
}

ParameterFamily::ParameterFamily(std::string name, std::size_t parameter_dim,
                                 DynamicsMap dynamics, Matrix b, Matrix q, Matrix p)
    : name_(std::move(name)),
      parameter_dim_(parameter_dim),
      dynamics_(std::move(dynamics)),
      b_(std::move(b)),
      q_(std::move(q)),
      p_(std::move(p)) {
  if (q_.cols() != b_.rows() || p_.cols() != b_.rows()) {
    throw DimensionError("family '" + name_ + "': Q, P and B disagree on the state dimension");
  }
}

Matrix ParameterFamily::a(const Vector& sigma) const {
  if (static_cast<std::size_t>(sigma.size()) != parameter_dim_) {
    throw DimensionError("family '" + name_ + "': expected a parameter of dimension " +
                         std::to_string(parameter_dim_));
  }
  Matrix a = dynamics_(sigma);
  if (a.rows() != b_.rows() || a.cols() != b_.rows()) {
    throw DimensionError("family '" + name_ + "': dynamics map returned a " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  }
  if (!a.allFinite()) throw Error("family '" + name_ + "': non-finite dynamics");
  return a;
}

ParameterFamily oscillator_family(Matrix q, Matrix p) {
  Matrix b(2, 1);
  b << 0.0, 1.0;
  auto dynamics = [](const Vector& sigma) {
    Matrix a(2, 2);
    a << 0.0, 1.0, -1.0, -sigma(0);
    return a;
  };
  return ParameterFamily("oscillator", 1, dynamics, std::move(b), std::move(q), std::move(p));
}

ParameterEnsemble::ParameterEnsemble(std::vector<Vector> members) : members_(std::move(members)) {
  if (members_.empty()) throw DimensionError("ensemble: needs at least one member");
  const auto dim = members_.front().size();
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].size() != dim) {
      throw DimensionError("ensemble: member " + std::to_string(i) + " has dimension " +
                           std::to_string(members_[i].size()) + ", expected " +
                           std::to_string(dim));
    }
  }
}

ParameterEnsemble ParameterEnsemble::symmetric_grid(double ell, std::size_t count) {
  if (count == 0) throw DimensionError("ensemble: count must be positive");
  std::vector<Vector> members;
  members.reserve(count);
  if (count == 1) {
    members.push_back(scalar_parameter(0.0));
  } else {
    const double r_max = static_cast<double>(count - 1);
    for (std::size_t r = 0; r < count; ++r) {
      members.push_back(scalar_parameter((-1.0 + 2.0 * static_cast<double>(r) / r_max) * ell));
    }
  }
  return ParameterEnsemble(std::move(members));
}

ParameterEnsemble ParameterEnsemble::scalars(std::span<const double> values) {
  std::vector<Vector> members;
  for (double v : values) members.push_back(scalar_parameter(v));
  return ParameterEnsemble(std::move(members));
}

Vector ParameterEnsemble::mean() const {
  Vector sum = Vector::Zero(members_.front().size());
  for (const auto& m : members_) sum += m;
  return sum / static_cast<double>(members_.size());
}

ParameterEnsemble ParameterEnsemble::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != members_.size()) throw DimensionError("permutation: wrong length");
  std::vector<bool> seen(perm.size(), false);
  std::vector<Vector> out;
  out.reserve(perm.size());
  for (std::size_t idx : perm) {
    if (idx >= perm.size() || seen[idx]) throw DimensionError("permutation: not a bijection");
    seen[idx] = true;
    out.push_back(members_[idx]);
  }
  return ParameterEnsemble(std::move(out));
}

EnsembleSystem::EnsembleSystem(std::vector<Matrix> blocks, Matrix b, Matrix q, Matrix p,
                               double output_weight)
    : blocks_(std::move(blocks)),
      b_(std::move(b)),
      q_(std::move(q)),
      p_(std::move(p)),
      output_weight_(output_weight) {
  if (blocks_.empty()) throw DimensionError("ensemble system: no blocks");
  const auto n = b_.rows();
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != n || blocks_[i].cols() != n) {
      throw DimensionError("ensemble system: block " + std::to_string(i) +
                           " does not match the input matrix");
    }
  }
  if (q_.cols() != n || p_.cols() != n) {
    throw DimensionError("ensemble system: output weights do not match the state dimension");
  }
  if (!(output_weight_ >= 0.0)) throw RangeError("ensemble system: negative output weight");
}

EnsembleSystem EnsembleSystem::with_output_weight(double weight) const {
  return EnsembleSystem(blocks_, b_, q_, p_, weight);
}

Matrix EnsembleSystem::dense_a() const {
  const auto n = static_cast<Eigen::Index>(state_dim());
  Matrix a = Matrix::Zero(n * members(), n * members());
  for (std::size_t i = 0; i < members(); ++i) {
    a.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) =
        blocks_[i];
  }
  return a;
}

Matrix EnsembleSystem::stacked_b() const {
  const auto n = b_.rows();
  Matrix out(n * static_cast<Eigen::Index>(members()), b_.cols());
  for (std::size_t i = 0; i < members(); ++i) {
    out.middleRows(static_cast<Eigen::Index>(i) * n, n) = b_;
  }
  return out;
}

Vector EnsembleSystem::apply_a(const Vector& x) const {
  const auto n = static_cast<Eigen::Index>(state_dim());
  if (x.size() != n * static_cast<Eigen::Index>(members())) {
    throw DimensionError("ensemble system: state length mismatch");
  }
  Vector out(x.size());
  for (std::size_t i = 0; i < members(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * n;
    out.segment(off, n).noalias() = blocks_[i] * x.segment(off, n);
  }
  return out;
}

Vector EnsembleSystem::apply_a_transpose(const Vector& x) const {
  const auto n = static_cast<Eigen::Index>(state_dim());
  if (x.size() != n * static_cast<Eigen::Index>(members())) {
    throw DimensionError("ensemble system: state length mismatch");
  }
  Vector out(x.size());
  for (std::size_t i = 0; i < members(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * n;
    out.segment(off, n).noalias() = blocks_[i].transpose() * x.segment(off, n);
  }
  return out;
}

EnsembleSystem build_ensemble(const ParameterFamily& family, const ParameterEnsemble& ensemble) {
  std::vector<Matrix> blocks;
  blocks.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    try {
      blocks.push_back(family.a(ensemble[i]));
    } catch (const DimensionError& e) {
      throw DimensionError("ensemble member " + std::to_string(i) + ": " + e.what());
    }
  }
  const double weight = 1.0 / static_cast<double>(ensemble.size());
  return EnsembleSystem(std::move(blocks), family.b(), family.q(), family.p(), weight);
}

Vector extend(const Vector& z, std::size_t count) {
  if (count == 0) throw DimensionError("extend: count must be positive");
  return z.replicate(static_cast<Eigen::Index>(count), 1);
}

Vector adjoint_extend(const Vector& w, std::size_t n) {
  if (n == 0 || static_cast<std::size_t>(w.size()) % n != 0) {
    throw DimensionError("adjoint_extend: length " + std::to_string(w.size()) +
                         " is not a multiple of " + std::to_string(n));
  }
  const auto nn = static_cast<Eigen::Index>(n);
  Vector out = Vector::Zero(nn);
  for (Eigen::Index off = 0; off < w.size(); off += nn) out += w.segment(off, nn);
  return out;
}

DeltaA delta_a(const ParameterFamily& family, const ParameterEnsemble& ensemble,
               const Vector& sigma) {
  const Matrix reference = family.a(sigma);
  DeltaA out;
  out.blocks.reserve(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    out.blocks.push_back(family.a(ensemble[i]) - reference);
    const Eigen::JacobiSVD<Matrix> svd(out.blocks.back());
    const double s = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    out.norm = std::max(out.norm, s);
  }
  return out;
}

}  // namespace enstrack
