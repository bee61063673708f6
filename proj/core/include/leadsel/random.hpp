#pragma once

#include <cstdint>
#include <random>

namespace leadsel {

/// SplitMix64 finalizer. Used to derive independent seeds from a root seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for substream `stream` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x5851F42D4C957F2DULL));
}

/// Seed of run `run` in matrix cell `cell` of a campaign rooted at `root_seed`.
constexpr std::uint64_t run_seed(std::uint64_t root_seed, std::uint64_t cell,
                                 std::uint64_t run) noexcept {
  return derive_seed(derive_seed(root_seed, cell), run);
}

/// Deterministic random stream. The engine's output sequence is fixed by the
/// standard and the conversions below do not rely on library distributions,
/// so draws are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    for (;;) {
      const u128 product = static_cast<u128>(engine_()) * bound;
      const auto low = static_cast<std::uint64_t>(product);
      if (low >= bound || low >= (0 - bound) % bound) {
        return static_cast<std::uint64_t>(product >> 64);
      }
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  __extension__ typedef unsigned __int128 u128;

  std::mt19937_64 engine_;
};

}  // namespace leadsel
