#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace bergman {

/// Identifies one random stream below a master seed, e.g. {p, sample_index}.
using SeedPath = std::vector<std::uint64_t>;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output i is a bijective mix of (key + i * golden gamma),
/// so a stream is a pure function of (seed, path, i) and never depends on the
/// order in which streams are consumed.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::span<const std::uint64_t> path) {
    std::uint64_t k = splitmix64_mix(seed ^ 0x6a09e667f3bcc908ULL);
    for (std::uint64_t p : path) k = splitmix64_mix(k ^ splitmix64_mix(p + 0x9e3779b97f4a7c15ULL));
    key_ = k;
  }
  CounterStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : CounterStream(seed, std::span<const std::uint64_t>(path.begin(), path.size())) {}

  std::uint64_t next_u64() { return splitmix64_mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard complex Gaussian N_C(0,1): E|eta|^2 = 1, real and imaginary variance 1/2.
  std::complex<double> complex_normal() {
    const double radius = std::sqrt(-std::log(uniform()));
    const double angle = 6.283185307179586476925 * uniform();
    return std::polar(radius, angle);
  }

  /// Standard real normal via the real part of a complex draw (scaled).
  double normal() { return std::sqrt(2.0) * complex_normal().real(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace bergman
