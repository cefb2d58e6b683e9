#pragma once

#include <cstdint>
#include <random>

#include "ucadoa/types.hpp"

namespace ucadoa {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded substream generator: stream `index` of master seed `master` is
/// statistically independent of every other stream, so Monte Carlo trials
/// can fan out in any order and still reproduce bit-identical results.
/// Normal variates use an explicit Box-Muller transform instead of
/// std::normal_distribution, whose output is implementation-defined.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t master, std::uint64_t index)
      : gen_(mix64(mix64(master) ^ mix64(index + 0x5851f42d4c957f2dULL))) {}

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Circular complex Gaussian with E|z|^2 = power (variance power/2 per
  /// dimension).
  cplx circular_gaussian(double power) {
    double s = std::sqrt(power * 0.5);
    double re = gaussian();
    double im = gaussian();
    return {s * re, s * im};
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace ucadoa
