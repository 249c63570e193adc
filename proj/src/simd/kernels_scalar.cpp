#include "enstrack/simd/kernels.hpp"

namespace enstrack::simd {
namespace {

void block_diag_product(const double* x, std::size_t ld_x, std::size_t rows,
                        const double* const* blocks, std::size_t count, std::size_t n,
                        double* out, std::size_t ld_out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * ld_x;
    double* orow = out + r * ld_out;
    for (std::size_t j = 0; j < count; ++j) {
      const double* e = blocks[j];
      const double* xs = xr + j * n;
      double* os = orow + j * n;
      for (std::size_t c = 0; c < n; ++c) os[c] = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double s = xs[k];
        const double* ek = e + k * n;
        for (std::size_t c = 0; c < n; ++c) os[c] += s * ek[c];
      }
    }
  }
}

void sym_rank_update(const double* y, std::size_t dim, std::size_t cols, double alpha,
                     double beta, double* out) {
  for (std::size_t i = 0; i < dim; ++i) {
    const double* yi = y + i * cols;
    for (std::size_t j = i; j < dim; ++j) {
      const double* yj = y + j * cols;
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += yi[c] * yj[c];
      const double v = alpha * acc + beta * out[i * dim + j];
      out[i * dim + j] = v;
      out[j * dim + i] = v;
    }
  }
}

void axpy(double a, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, const double* y, double* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = x[i] + a * y[i];
}

double dot(const double* x, const double* y, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void gemv(const double* a, std::size_t lda, std::size_t rows, std::size_t cols, const double* x,
          double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * lda, x, cols);
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", block_diag_product, sym_rank_update, axpy, xpay, dot,
                                 gemv};
  return table;
}

}  // namespace enstrack::simd
