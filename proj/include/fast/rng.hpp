#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace fast {

// Random stream owned by exactly one replicate. Copying a stream forks it:
// both copies produce the same sequence from that point on.
//
// Uniform and normal variates are derived from the raw 64-bit engine output
// by code in this class (not std:: distributions), so sequences do not depend
// on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  double standard_normal();

  double normal(double mean, double sd) { return mean + sd * standard_normal(); }

  /// Returns 1 with probability p. Throws InputError if p is outside [0, 1].
  int bernoulli(double p);

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace fast
