#include <cstdlib>
#include <string_view>

#include "enstrack/simd/kernels.hpp"

namespace enstrack::simd {

#if defined(ENSTRACK_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(ENSTRACK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() noexcept {
  static const KernelTable& selected = []() -> const KernelTable& {
    if (const char* env = std::getenv("ENSEMBLE_TRACK_SIMD")) {
      if (std::string_view(env) == "scalar") return scalar_kernels();
    }
    if (const KernelTable* fast = avx2_kernels()) return *fast;
    return scalar_kernels();
  }();
  return selected;
}

}  // namespace enstrack::simd
