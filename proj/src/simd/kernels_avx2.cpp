// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "enstrack/simd/kernels.hpp"

namespace enstrack::simd {
namespace {

constexpr std::size_t kPanel = 8;
constexpr std::size_t kRows = 6;

// Block e (n x n, row-major) repacked as ceil(n/8) column panels of width 8,
// each stored k-major and zero padded.
void pack_panels(const double* e, std::size_t n, double* packed) {
  const std::size_t panels = (n + kPanel - 1) / kPanel;
  for (std::size_t p = 0; p < panels; ++p) {
    const std::size_t c0 = p * kPanel;
    const std::size_t width = std::min(kPanel, n - c0);
    double* dst = packed + p * n * kPanel;
    for (std::size_t k = 0; k < n; ++k) {
      const double* src = e + k * n + c0;
      std::size_t c = 0;
      for (; c < width; ++c) dst[k * kPanel + c] = src[c];
      for (; c < kPanel; ++c) dst[k * kPanel + c] = 0.0;
    }
  }
}

// 6 x 8 register tile over one packed panel.
inline void tile_6x8(const double* xs, std::size_t ld_x, const double* panel, std::size_t n,
                     double* os, std::size_t ld_out, std::size_t width) {
  __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
  __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
  __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
  __m256d c40 = _mm256_setzero_pd(), c41 = _mm256_setzero_pd();
  __m256d c50 = _mm256_setzero_pd(), c51 = _mm256_setzero_pd();
  const double* x0 = xs;
  const double* x1 = xs + ld_x;
  const double* x2 = xs + 2 * ld_x;
  const double* x3 = xs + 3 * ld_x;
  const double* x4 = xs + 4 * ld_x;
  const double* x5 = xs + 5 * ld_x;
  for (std::size_t k = 0; k < n; ++k) {
    const __m256d b0 = _mm256_loadu_pd(panel + k * kPanel);
    const __m256d b1 = _mm256_loadu_pd(panel + k * kPanel + 4);
    __m256d a = _mm256_broadcast_sd(x0 + k);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(x1 + k);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(x2 + k);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(x3 + k);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
    a = _mm256_broadcast_sd(x4 + k);
    c40 = _mm256_fmadd_pd(a, b0, c40);
    c41 = _mm256_fmadd_pd(a, b1, c41);
    a = _mm256_broadcast_sd(x5 + k);
    c50 = _mm256_fmadd_pd(a, b0, c50);
    c51 = _mm256_fmadd_pd(a, b1, c51);
  }
  if (width == kPanel) {
    _mm256_storeu_pd(os, c00);
    _mm256_storeu_pd(os + 4, c01);
    _mm256_storeu_pd(os + ld_out, c10);
    _mm256_storeu_pd(os + ld_out + 4, c11);
    _mm256_storeu_pd(os + 2 * ld_out, c20);
    _mm256_storeu_pd(os + 2 * ld_out + 4, c21);
    _mm256_storeu_pd(os + 3 * ld_out, c30);
    _mm256_storeu_pd(os + 3 * ld_out + 4, c31);
    _mm256_storeu_pd(os + 4 * ld_out, c40);
    _mm256_storeu_pd(os + 4 * ld_out + 4, c41);
    _mm256_storeu_pd(os + 5 * ld_out, c50);
    _mm256_storeu_pd(os + 5 * ld_out + 4, c51);
    return;
  }
  alignas(32) double buf[kRows][kPanel];
  _mm256_store_pd(buf[0], c00);
  _mm256_store_pd(buf[0] + 4, c01);
  _mm256_store_pd(buf[1], c10);
  _mm256_store_pd(buf[1] + 4, c11);
  _mm256_store_pd(buf[2], c20);
  _mm256_store_pd(buf[2] + 4, c21);
  _mm256_store_pd(buf[3], c30);
  _mm256_store_pd(buf[3] + 4, c31);
  _mm256_store_pd(buf[4], c40);
  _mm256_store_pd(buf[4] + 4, c41);
  _mm256_store_pd(buf[5], c50);
  _mm256_store_pd(buf[5] + 4, c51);
  for (std::size_t r = 0; r < kRows; ++r) {
    for (std::size_t c = 0; c < width; ++c) os[r * ld_out + c] = buf[r][c];
  }
}

inline void tile_1x8(const double* xr, const double* panel, std::size_t n, double* orow,
                     std::size_t width) {
  __m256d c0 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
  for (std::size_t k = 0; k < n; ++k) {
    const __m256d a = _mm256_broadcast_sd(xr + k);
    c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(panel + k * kPanel), c0);
    c1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(panel + k * kPanel + 4), c1);
  }
  alignas(32) double buf[kPanel];
  _mm256_store_pd(buf, c0);
  _mm256_store_pd(buf + 4, c1);
  for (std::size_t c = 0; c < width; ++c) orow[c] = buf[c];
}

void block_diag_product(const double* x, std::size_t ld_x, std::size_t rows,
                        const double* const* blocks, std::size_t count, std::size_t n,
                        double* out, std::size_t ld_out) {
  const std::size_t panels = (n + kPanel - 1) / kPanel;
  thread_local std::vector<double> packed;
  packed.resize(panels * n * kPanel);
  for (std::size_t j = 0; j < count; ++j) {
    pack_panels(blocks[j], n, packed.data());
    for (std::size_t p = 0; p < panels; ++p) {
      const double* panel = packed.data() + p * n * kPanel;
      const std::size_t c0 = p * kPanel;
      const std::size_t width = std::min(kPanel, n - c0);
      std::size_t r = 0;
      for (; r + kRows <= rows; r += kRows) {
        tile_6x8(x + r * ld_x + j * n, ld_x, panel, n, out + r * ld_out + j * n + c0, ld_out,
                 width);
      }
      for (; r < rows; ++r) {
        tile_1x8(x + r * ld_x + j * n, panel, n, out + r * ld_out + j * n + c0, width);
      }
    }
  }
}

// Full-matrix evaluation with one fixed FMA order per entry; (i,j) and (j,i)
// see the same operand pairs, so the output stays bitwise symmetric.
void sym_rank_update(const double* y, std::size_t dim, std::size_t cols, double alpha,
                     double beta, double* out) {
  thread_local std::vector<double> yt;
  yt.resize(cols * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t c = 0; c < cols; ++c) yt[c * dim + i] = y[i * cols + c];
  }
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  for (std::size_t i = 0; i < dim; ++i) {
    const double* yi = y + i * cols;
    double* orow = out + i * dim;
    std::size_t j = 0;
    for (; j + 4 <= dim; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t c = 0; c < cols; ++c) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(yi + c), _mm256_loadu_pd(yt.data() + c * dim + j),
                              acc);
      }
      const __m256d prev = _mm256_mul_pd(vb, _mm256_loadu_pd(orow + j));
      _mm256_storeu_pd(orow + j, _mm256_fmadd_pd(va, acc, prev));
    }
    for (; j < dim; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = std::fma(yi[c], yt[c * dim + j], acc);
      orow[j] = std::fma(alpha, acc, beta * orow[j]);
    }
  }
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < len; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay(const double* x, double a, const double* y, double* out, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < len; ++i) out[i] = std::fma(a, y[i], x[i]);
}

double dot(const double* x, const double* y, std::size_t len) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= len; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(a0, a1));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

void gemv(const double* a, std::size_t lda, std::size_t rows, std::size_t cols, const double* x,
          double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * lda, x, cols);
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{"avx2", block_diag_product, sym_rank_update, axpy, xpay, dot,
                                 gemv};
  return table;
}

}  // namespace enstrack::simd
