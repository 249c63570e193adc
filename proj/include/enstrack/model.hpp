#pragma once

// Parameter-dependent linear systems  y' = A(sigma) y + B u  with shared
// output weights Q (running) and P (terminal), finite parameter ensembles, and
// the block-diagonal extended system that stacks one copy of the dynamics per
// ensemble member behind a single shared input.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enstrack/types.hpp"

namespace enstrack {

struct LtiSystem {
  Matrix a;  // n x n
  Matrix b;  // n x m
  Matrix q;  // rows x n, running output weight
  Matrix p;  // rows x n, terminal output weight

  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(a.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(b.cols()); }

  /// Throws DimensionError on inconsistent shapes, Error on non-finite entries.
  void validate() const;
};

class ParameterFamily {
 public:
  using DynamicsMap = std::function<Matrix(const Vector&)>;

  ParameterFamily(std::string name, std::size_t parameter_dim, DynamicsMap dynamics, Matrix b,
                  Matrix q, Matrix p);

  const std::string& name() const noexcept { return name_; }
  std::size_t parameter_dim() const noexcept { return parameter_dim_; }
  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(b_.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(b_.cols()); }

  Matrix a(const Vector& sigma) const;
  const Matrix& b() const noexcept { return b_; }
  const Matrix& q() const noexcept { return q_; }
  const Matrix& p() const noexcept { return p_; }

  LtiSystem system(const Vector& sigma) const { return {a(sigma), b_, q_, p_}; }

 private:
  std::string name_;
  std::size_t parameter_dim_;
  DynamicsMap dynamics_;
  Matrix b_;
  Matrix q_;
  Matrix p_;
};

/// Damped oscillator  theta'' = -theta - sigma theta' + u  as a first-order
/// family with A = [[0,1],[-1,-sigma]], B = [0;1].
ParameterFamily oscillator_family(Matrix q, Matrix p);

class ParameterEnsemble {
 public:
  explicit ParameterEnsemble(std::vector<Vector> members);

  /// Scalar ensemble {(-1 + 2r/R) * ell : r = 0..R} with count = R + 1.
  /// count == 1 yields {0}.
  static ParameterEnsemble symmetric_grid(double ell, std::size_t count);
  static ParameterEnsemble scalars(std::span<const double> values);

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t parameter_dim() const noexcept {
    return static_cast<std::size_t>(members_.front().size());
  }
  const Vector& operator[](std::size_t i) const { return members_.at(i); }
  const std::vector<Vector>& members() const noexcept { return members_; }

  Vector mean() const;

  /// Member i of the result is member perm[i] of this ensemble.
  ParameterEnsemble permuted(std::span<const std::size_t> perm) const;

 private:
  std::vector<Vector> members_;
};

/// Block-diagonal extended system. The dense Nn x Nn operator is never formed
/// except on request; blocks are kept individually.
class EnsembleSystem {
 public:
  EnsembleSystem(std::vector<Matrix> blocks, Matrix b, Matrix q, Matrix p, double output_weight);

  std::size_t members() const noexcept { return blocks_.size(); }
  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(b_.rows()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(b_.cols()); }
  std::size_t extended_dim() const noexcept { return members() * state_dim(); }

  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  const Matrix& b() const noexcept { return b_; }
  const Matrix& q() const noexcept { return q_; }
  const Matrix& p() const noexcept { return p_; }

  /// Factor applied to the Q- and P-blocks of the extended objective
  /// (1/N unless overridden).
  double output_weight() const noexcept { return output_weight_; }
  EnsembleSystem with_output_weight(double weight) const;

  Matrix dense_a() const;
  /// N vertical copies of B.
  Matrix stacked_b() const;

  Vector apply_a(const Vector& x) const;
  Vector apply_a_transpose(const Vector& x) const;

 private:
  std::vector<Matrix> blocks_;
  Matrix b_;
  Matrix q_;
  Matrix p_;
  double output_weight_;
};

EnsembleSystem build_ensemble(const ParameterFamily& family, const ParameterEnsemble& ensemble);

Vector extend(const Vector& z, std::size_t count);
/// Sum of the n-blocks of w.
Vector adjoint_extend(const Vector& w, std::size_t n);

struct DeltaA {
  std::vector<Matrix> blocks;  // A(sigma_i) - A(sigma)
  double norm = 0.0;           // spectral norm of blkdiag(blocks)
};

DeltaA delta_a(const ParameterFamily& family, const ParameterEnsemble& ensemble,
               const Vector& sigma);

inline Vector scalar_parameter(double s) { return Vector::Constant(1, s); }

}  // namespace enstrack
