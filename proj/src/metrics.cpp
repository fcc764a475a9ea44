#include "varlp/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlp {

double mse(const ScalarField& f, const ScalarField& ref) {
  require_same_spec(f.spec(), ref.spec(), "mse");
  double s = 0.0;
  const std::int64_t n = f.size();
  for (std::int64_t k = 0; k < n; ++k) {
    const double d = f[k] - ref[k];
    s += d * d;
  }
  return s / static_cast<double>(n);
}

double psnr(const ScalarField& f, const ScalarField& ref) {
  const double range = ref.maximum() - ref.minimum();
  if (range == 0.0) throw std::invalid_argument("psnr: reference has zero dynamic range");
  const double m = mse(f, ref);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(range * range / m);
}

}  // namespace varlp
