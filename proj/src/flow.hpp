#pragma once

#include <vector>

#include "enstrack/types.hpp"

namespace enstrack::detail {

// Exact flow of x' = A x over a half step and a full step, and optionally the
// integrated source  int_0^s exp(A^T r) C exp(A r) dr  for the same two
// lengths. Row-major so the blocks can be handed to the SIMD kernels.
struct BlockFlow {
  RowMatrix half;
  RowMatrix full;
  RowMatrix source_half;
  RowMatrix source_full;
};

BlockFlow make_block_flow(const Matrix& a, double h, const Matrix* source = nullptr);

// Propagator for a list of blocks (one per ensemble member).
struct EnsembleFlow {
  std::vector<BlockFlow> blocks;
  std::vector<const double*> half_ptrs;
  std::vector<const double*> full_ptrs;
};

EnsembleFlow make_ensemble_flow(const std::vector<Matrix>& blocks, double h,
                                const Matrix* source = nullptr);

// x_i <- E_i x_i (transpose: E_i^T x_i) for each n-block of x.
void apply_blocks(const std::vector<BlockFlow>& flows, bool full, bool transpose, const Vector& x,
                  Vector& out);

}  // namespace enstrack::detail
