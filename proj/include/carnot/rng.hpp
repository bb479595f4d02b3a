#pragma once

#include <cstdint>

namespace carnot {

// Counter-based pseudo-random stream (splitmix64 finalizer).  Every draw is a
// pure function of (seed, stream, counter), so substreams can be handed to
// concurrent workers without coordination and results never depend on call
// order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(mix(seed_ ^ mix(stream_)) + counter);
  }

  // uniform in [0,1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // uniform in [lo,hi)
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  CounterRng substream(std::uint64_t id) const {
    return CounterRng(seed_, mix(stream_ ^ mix(id)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// FNV-1a, used to derive named substreams and to hash configs.
inline std::uint64_t fnv1a(const char* data, std::uint64_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint64_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace carnot
