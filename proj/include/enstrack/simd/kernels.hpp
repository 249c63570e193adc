#pragma once

// Dense inner kernels used by the Riccati flow and the closed-loop integrators.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant compiled into its own translation unit. The variant is chosen once
// at startup from CPUID; ENSEMBLE_TRACK_SIMD=scalar forces the reference path.
// All matrices are row-major with an explicit leading dimension.

#include <cstddef>
#include <string_view>

namespace enstrack::simd {

struct KernelTable {
  std::string_view name;

  // out(rows x n*count) = x(rows x n*count) * blkdiag(blocks[0..count)).
  // Each block is n x n, contiguous row-major. ld_x / ld_out are row strides.
  void (*block_diag_product)(const double* x, std::size_t ld_x, std::size_t rows,
                             const double* const* blocks, std::size_t count, std::size_t n,
                             double* out, std::size_t ld_out);

  // out(dim x dim) = alpha * y * y^T + beta * out, y is dim x cols.
  // Only the upper triangle is computed and mirrored, so the result is exactly
  // symmetric whenever out was.
  void (*sym_rank_update)(const double* y, std::size_t dim, std::size_t cols, double alpha,
                          double beta, double* out);

  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t len);

  // out = x + a * y
  void (*xpay)(const double* x, double a, const double* y, double* out, std::size_t len);

  double (*dot)(const double* x, const double* y, std::size_t len);

  // y = A x, A rows x cols with leading dimension lda.
  void (*gemv)(const double* a, std::size_t lda, std::size_t rows, std::size_t cols,
               const double* x, double* y);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the binary was built without the AVX2 unit or the CPU lacks
// AVX2+FMA.
const KernelTable* avx2_kernels() noexcept;

// Selected once; honours ENSEMBLE_TRACK_SIMD=scalar.
const KernelTable& kernels() noexcept;

}  // namespace enstrack::simd
