#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dualion {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the n-th output is a fixed mix of (key, n), so a
// stream is fully determined by its key and never shares state with another.
// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    return splitmix64(key_ ^ splitmix64(counter_++ * 0xd1342543de82ef95ULL));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derives an independent stream from a master seed and a path of indices,
// e.g. (seed, {experiment id, sweep index, substream, shot index}).
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t id : path) {
    key = splitmix64(key ^ splitmix64(id + 0x3c6ef372fe94f82bULL));
  }
  return Rng(key);
}

}  // namespace dualion
