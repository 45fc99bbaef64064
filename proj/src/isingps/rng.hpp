#pragma once

#include <cstdint>

namespace isingps {

// Stateless 64-bit finalizer (splitmix64 core).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation),
// seeded through a splitmix64 sequence.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      word = mix64(s);
    }
  }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Stream purposes keep the derived seed spaces of different samplers disjoint.
enum class StreamKind : std::uint64_t {
  kDirectSample = 1,
  kLangevinTrajectory = 2,
  kTest = 99,
};

// Seed for the stream of trajectory `index`. Counter-based: depends only on
// (master_seed, index, kind), never on ensemble size or worker scheduling.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index,
                                 StreamKind kind);

// Standard normal draws (Box-Muller, second value cached). One stream is owned
// by exactly one trajectory, so draw order is reproducible.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t index, StreamKind kind)
      : engine_(derive_stream_seed(master_seed, index, kind)) {}

  // Uniform on (0, 1]; never returns 0, safe under log().
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double next();
  double next_scaled(double sd) { return sd * next(); }

 private:
  Xoshiro256 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace isingps
