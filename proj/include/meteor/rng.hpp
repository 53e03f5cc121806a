#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace meteor {

// Counter-based random streams.
//
// Every stream is identified by a 64-bit key derived from (seed, domain,
// index). Output number i of a stream is splitmix64_mix(key + (i + 1) * kGolden),
// so any draw can be recomputed from its coordinates alone, independently of
// the order in which other streams are consumed. This is the SplitMix64
// construction used as a keyed counter generator; it is the pinned algorithm
// behind every bit-exact output of the simulator.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named stream families. Values are part of the reproducibility contract.
enum class StreamDomain : std::uint64_t {
  vertex_clock = 1,    // per-vertex Poisson hit times, index = vertex
  global_clock = 2,    // streaming superposed clock, index = 0
  wimp_start = 3,      // initial WIMP positions, index = walk
  wimp_direction = 4,  // WIMP jump directions, index = walk, counter = jump
  coupling = 5,        // mirror-coupling skeletons, index = stage
  initial_state = 6,   // random initial mass profiles
  replica = 7,         // per-replica seed derivation
  experiment = 8,      // miscellaneous experiment-level draws
};

constexpr std::uint64_t derive_key(std::uint64_t seed, StreamDomain domain,
                                   std::uint64_t index) noexcept {
  std::uint64_t k = splitmix64_mix(seed + kGolden);
  k = splitmix64_mix(k ^ (static_cast<std::uint64_t>(domain) * 0xd1b54a32d192ed03ULL));
  return splitmix64_mix(k + index * kGolden);
}

class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr Stream() = default;
  constexpr explicit Stream(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}
  constexpr Stream(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
      : key_(derive_key(seed, domain, index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGolden);
  }

  // Random access: the value the stream yields at draw number `counter`
  // (0-based), without advancing.
  constexpr result_type at(std::uint64_t counter) const noexcept {
    return splitmix64_mix(key_ + (counter + 1) * kGolden);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit((*this)()); }

  // Uniform on (0, 1].
  double uniform_positive() noexcept { return 1.0 - uniform(); }

  // Exponential with the given rate.
  double exponential(double rate = 1.0) noexcept { return -std::log(uniform_positive()) / rate; }

  // Unbiased integer in [0, n), Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept { return bounded(*this, n); }

  static constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  template <class Gen>
  static std::uint64_t bounded(Gen& gen, std::uint64_t n) noexcept {
    std::uint64_t x = gen();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = gen();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Single-draw helper for keyed randomness at a fixed (stream, counter).
// Rejection retries (rare) continue on a sub-stream keyed by the counter.
inline std::uint64_t keyed_below(const Stream& s, std::uint64_t counter, std::uint64_t n) noexcept {
  Stream sub(splitmix64_mix(s.key() ^ splitmix64_mix(counter + kGolden)));
  return sub.below(n);
}

}  // namespace meteor
