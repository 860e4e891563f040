#include "fast/rng.hpp"

#include <cmath>

#include "fast/errors.hpp"

namespace fast {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw InputError("uniform_index: empty range");
  const auto index = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return index < n ? index : n - 1;
}

double Rng::standard_normal() {
  if (spare_normal_) {
    const double value = *spare_normal_;
    spare_normal_.reset();
    return value;
  }
  // Marsaglia polar method.
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * scale;
  return u * scale;
}

int Rng::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InputError("bernoulli: probability must lie in [0, 1]");
  }
  return uniform() < p ? 1 : 0;
}

}  // namespace fast
