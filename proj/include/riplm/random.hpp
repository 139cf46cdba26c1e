#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace riplm {

using Rng = std::mt19937_64;

/// Independent generator for (master seed, substream ids...). The same key
/// always yields the same stream, so trial order never affects output.
inline Rng make_stream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> stream = {}) {
  std::vector<std::uint32_t> key;
  key.reserve(2 + 2 * stream.size());
  auto push = [&](std::uint64_t v) {
    key.push_back(static_cast<std::uint32_t>(v));
    key.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(key.begin(), key.end());
  return Rng(seq);
}

/// Uniform on [0, 1) from the top 53 bits; identical across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection keeps the draw unbiased and portable.
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Substream tags.
namespace stream {
inline constexpr std::uint64_t kLosses = 1;
inline constexpr std::uint64_t kAvailability = 2;
inline constexpr std::uint64_t kDistinguished = 3;
inline constexpr std::uint64_t kSampling = 4;
inline constexpr std::uint64_t kAwakeRetry = 5;
}  // namespace stream

}  // namespace riplm
