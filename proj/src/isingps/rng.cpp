#include "isingps/rng.hpp"

#include <cmath>
#include <numbers>

namespace isingps {

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index,
                                 StreamKind kind) {
  std::uint64_t x = master_seed + 0x9e3779b97f4a7c15ULL;
  x = mix64(x);
  x = mix64(x ^ (index * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL));
  x = mix64(x ^ (static_cast<std::uint64_t>(kind) * 0x94d049bb133111ebULL));
  return x;
}

double GaussianStream::next() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  have_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace isingps
