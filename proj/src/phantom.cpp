#include "varlp/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace varlp {

ScalarField square_phantom(const GridSpec& spec) {
  const double eps = 1e-12;
  if (std::abs(spec.x0 + 10.0) > eps || std::abs(spec.x1 - 10.0) > eps ||
      std::abs(spec.y0 + 10.0) > eps || std::abs(spec.y1 - 10.0) > eps)
    throw std::invalid_argument("square_phantom: extent must be [-10,10]^2");

  ScalarField f(spec);
  for (std::int64_t i = 0; i < spec.rows; ++i)
    for (std::int64_t j = 0; j < spec.cols; ++j) {
      const Point c = spec.cell_center(i, j);
      f.at(i, j) = (std::abs(c.x) <= 5.0 && std::abs(c.y) <= 5.0) ? c.x : 0.0;
    }
  return f;
}

}  // namespace varlp
