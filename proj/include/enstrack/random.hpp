#pragma once

// Counter-based Philox4x32-10 generator. Every variate is a pure function of
// (seed, stream, index), so draws are reproducible regardless of how work is
// split across threads.

#include <array>
#include <cstdint>

namespace enstrack {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(Block counter) const noexcept;

  /// Two uniforms in (0, 1) with 53-bit resolution from one counter block.
  std::array<double, 2> uniform_pair(std::uint64_t stream, std::uint64_t index) const noexcept;

  /// Standard normal variate number `index` of `stream` (Box-Muller on the
  /// uniform pair of index/2; even indices take the cosine branch).
  double normal(std::uint64_t stream, std::uint64_t index) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace enstrack
