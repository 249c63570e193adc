#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "enstrack/simd/kernels.hpp"

using namespace enstrack::simd;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0, scale = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  return worst / scale;
}

class Avx2 : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!avx2_kernels()) GTEST_SKIP() << "AVX2 variant not available on this host";
  }
  const KernelTable& ref = scalar_kernels();
  const KernelTable& vec() { return *avx2_kernels(); }
};

}  // namespace

TEST(Dispatch, SelectsAKernelTable) {
  EXPECT_FALSE(kernels().name.empty());
  EXPECT_EQ(scalar_kernels().name, "scalar");
}

TEST(ScalarKernels, BlockDiagProductMatchesNaive) {
  const std::size_t n = 3, count = 2, rows = 4, cols = n * count;
  const auto x = random_vec(rows * cols, 1);
  const auto b0 = random_vec(n * n, 2), b1 = random_vec(n * n, 3);
  const double* blocks[] = {b0.data(), b1.data()};
  std::vector<double> out(rows * cols);
  scalar_kernels().block_diag_product(x.data(), cols, rows, blocks, count, n, out.data(), cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t blk = 0; blk < count; ++blk) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += x[r * cols + blk * n + k] * blocks[blk][k * n + j];
        EXPECT_NEAR(out[r * cols + blk * n + j], s, 1e-15);
      }
    }
  }
}

TEST_F(Avx2, BlockDiagProduct) {
  // sizes exercising full 6x8 tiles and every remainder path
  for (std::size_t n : {1u, 3u, 7u, 8u, 13u, 101u}) {
    for (std::size_t count : {1u, 2u, 5u}) {
      for (std::size_t rows : {1u, 5u, 6u, 11u}) {
        const std::size_t cols = n * count, ld = cols + 3;
        const auto x = random_vec(rows * ld, static_cast<unsigned>(n * 31 + count));
        std::vector<std::vector<double>> blk;
        std::vector<const double*> ptr;
        for (std::size_t b = 0; b < count; ++b) {
          blk.push_back(random_vec(n * n, static_cast<unsigned>(b + 100)));
          ptr.push_back(blk.back().data());
        }
        std::vector<double> a(rows * ld, 7.0), v(rows * ld, 7.0);
        ref.block_diag_product(x.data(), ld, rows, ptr.data(), count, n, a.data(), ld);
        vec().block_diag_product(x.data(), ld, rows, ptr.data(), count, n, v.data(), ld);
        EXPECT_LE(max_rel(a, v), 1e-14) << "n=" << n << " count=" << count << " rows=" << rows;
        // padding columns untouched
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = cols; c < ld; ++c) EXPECT_EQ(v[r * ld + c], 7.0);
        }
      }
    }
  }
}

TEST_F(Avx2, SymRankUpdate) {
  for (std::size_t dim : {1u, 4u, 9u, 33u}) {
    for (std::size_t cols : {1u, 3u}) {
      const auto y = random_vec(dim * cols, static_cast<unsigned>(dim));
      auto base = random_vec(dim * dim, 5);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) base[i * dim + j] = base[j * dim + i];
      }
      auto a = base, v = base;
      ref.sym_rank_update(y.data(), dim, cols, -1.0, 0.5, a.data());
      vec().sym_rank_update(y.data(), dim, cols, -1.0, 0.5, v.data());
      EXPECT_LE(max_rel(a, v), 1e-14);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) EXPECT_EQ(v[i * dim + j], v[j * dim + i]);
      }
    }
  }
}

TEST_F(Avx2, VectorKernels) {
  for (std::size_t len : {0u, 1u, 3u, 4u, 17u, 1000u}) {
    const auto x = random_vec(len, 1), y = random_vec(len, 2);
    auto ya = y, yv = y;
    ref.axpy(0.3, x.data(), ya.data(), len);
    vec().axpy(0.3, x.data(), yv.data(), len);
    EXPECT_LE(max_rel(ya, yv), 1e-15);

    std::vector<double> oa(len), ov(len);
    ref.xpay(x.data(), -1.5, y.data(), oa.data(), len);
    vec().xpay(x.data(), -1.5, y.data(), ov.data(), len);
    EXPECT_LE(max_rel(oa, ov), 1e-15);

    EXPECT_NEAR(ref.dot(x.data(), y.data(), len), vec().dot(x.data(), y.data(), len),
                1e-13 * (1.0 + static_cast<double>(len)));
  }
}

TEST_F(Avx2, Gemv) {
  for (std::size_t rows : {1u, 5u, 12u}) {
    for (std::size_t cols : {1u, 3u, 8u, 29u}) {
      const std::size_t lda = cols + 2;
      const auto a = random_vec(rows * lda, 3), x = random_vec(cols, 4);
      std::vector<double> ya(rows), yv(rows);
      ref.gemv(a.data(), lda, rows, cols, x.data(), ya.data());
      vec().gemv(a.data(), lda, rows, cols, x.data(), yv.data());
      EXPECT_LE(max_rel(ya, yv), 1e-14);
    }
  }
}
