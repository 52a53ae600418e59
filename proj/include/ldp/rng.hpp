#pragma once

#include <cstdint>

namespace ldp {

// 64-bit finalizer with full avalanche (splitmix64 constants). Bijective,
// so distinct inputs never collide.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Derives one stream seed from up to three components (master seed, trial
// index, user index). Chained mixing keeps streams statistically independent.
constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b,
                                    std::uint64_t c = 0) noexcept {
  std::uint64_t h = mix64(a ^ 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ b ^ 0xD1B54A32D192ED03ULL);
  h = mix64(h ^ c ^ 0x8CB92BA72F3D8DD7ULL);
  return h;
}

// Counter-based generator over a Weyl sequence (splitmix64). A single word
// of state makes per-user streams essentially free to construct, which
// matters when a simulation seeds millions of them.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~0ULL; }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); never returns an endpoint, so log() of it is safe.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Uniform integer in [0, m) by widening multiply; per-bucket bias is
  // below m / 2^64, far under the 2^-32 the estimator tests can resolve.
  std::uint64_t below(std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * m) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace ldp
