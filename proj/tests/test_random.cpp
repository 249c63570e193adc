#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>

#include "enstrack/parallel.hpp"
#include "enstrack/random.hpp"

using namespace enstrack;

namespace {

// Philox4x32-10 known-answer vectors (Random123 kat_vectors).
Philox4x32::Block run(std::uint64_t key, Philox4x32::Block ctr) { return Philox4x32(key)(ctr); }

}  // namespace

TEST(Philox, KnownAnswers) {
  EXPECT_EQ(run(0, {0, 0, 0, 0}),
            (Philox4x32::Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(run(0xffffffffffffffffull, {0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
            (Philox4x32::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(run(0x299f31d0a4093822ull, {0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
            (Philox4x32::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformsInOpenInterval) {
  const Philox4x32 rng(1);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto u = rng.uniform_pair(3, i);
    EXPECT_GT(u[0], 0.0);
    EXPECT_LT(u[0], 1.0);
    EXPECT_GT(u[1], 0.0);
    EXPECT_LT(u[1], 1.0);
  }
}

TEST(Philox, NormalMoments) {
  const Philox4x32 rng(2024);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(0, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Philox, BoxMullerPairing) {
  const Philox4x32 rng(9);
  const auto u = rng.uniform_pair(4, 3);
  const double r = std::sqrt(-2.0 * std::log(u[0]));
  EXPECT_DOUBLE_EQ(rng.normal(4, 6), r * std::cos(2 * std::numbers::pi * u[1]));
  EXPECT_DOUBLE_EQ(rng.normal(4, 7), r * std::sin(2 * std::numbers::pi * u[1]));
}

TEST(Parallel, RunsEachIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, RethrowsAfterJoin) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(20, 3,
                            [&](std::size_t i) {
                              ++done;
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_EQ(done.load(), 20);
}

TEST(Parallel, ThreadCapFromEnvironment) {
  setenv("ENSEMBLE_TRACK_THREADS", "3", 1);
  EXPECT_EQ(thread_cap(), 3u);
  setenv("ENSEMBLE_TRACK_THREADS", "junk", 1);
  EXPECT_GE(thread_cap(), 1u);
  unsetenv("ENSEMBLE_TRACK_THREADS");
}
