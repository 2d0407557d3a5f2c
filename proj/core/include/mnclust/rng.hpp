#pragma once

#include <cstdint>
#include <random>

namespace mnclust {

/// Splittable random stream. Every stochastic operation in the library takes
/// an explicit stream; there is no global RNG. Substreams are derived from
/// the (seed, stream) pair only, never from consumption state, so concurrent
/// workers can be handed independent, reproducible streams.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  /// Independent stream derived from this stream's identity.
  RandomStream substream(std::uint64_t id) const {
    return RandomStream(seed_, mix(stream_, id + 1));
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  // splitmix64 finalizer over the combined identity.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    for (int i = 0; i < 2; ++i) {
      x += 0x9e3779b97f4a7c15ULL;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      x = x ^ (x >> 31);
    }
    return x;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace mnclust
