#include "varlp/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace varlp {

namespace {
// 53-bit uniform in [0,1); independent of std::generate_canonical so the
// stream is identical on every platform.
double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

NoiseResult add_noise(const ScalarField& f, const NoiseSpec& spec) {
  if (!(spec.level >= 0.0) || !std::isfinite(spec.level))
    throw std::invalid_argument("add_noise: level must be finite and >= 0");
  if (spec.level == 0.0) return {f, false};

  const double range = f.maximum() - f.minimum();
  if (range == 0.0) return {f, true};

  const double sigma = spec.level * range;
  ScalarField out = f;
  std::mt19937_64 rng(spec.seed);
  const std::int64_t n = out.size();
  for (std::int64_t k = 0; k < n; k += 2) {
    const double u1 = 1.0 - uniform53(rng);  // (0,1], keeps log finite
    const double u2 = uniform53(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    out[k] += sigma * r * std::cos(a);
    if (k + 1 < n) out[k + 1] += sigma * r * std::sin(a);
  }
  return {std::move(out), false};
}

}  // namespace varlp
