#include "varlp/exponent_map.hpp"

#include <cmath>
#include <stdexcept>

namespace varlp {

namespace {
std::vector<double> snap_values(std::vector<double> p, double delta) {
  if (!(delta >= 0.0) || !(delta < 1.0))
    throw std::invalid_argument("ExponentMap: delta_snap must lie in [0,1)");
  const double band = 1.0 + delta;
  for (double& x : p) {
    if (!std::isfinite(x) || x < 1.0 || x > 2.0)
      throw std::invalid_argument("ExponentMap: exponent values must lie in [1,2]");
    if (x < band) x = 1.0;
  }
  return p;
}
}  // namespace

ExponentMap::ExponentMap(const GridSpec& spec, std::vector<double> values, double delta_snap)
    : spec_(spec), p_(snap_values(std::move(values), delta_snap)), delta_snap_(delta_snap) {
  if (static_cast<std::int64_t>(p_.size()) != spec_.size())
    throw std::invalid_argument("ExponentMap: value count does not match spec");
}

ExponentMap::ExponentMap(const ScalarField& values, double delta_snap)
    : ExponentMap(values.spec(), std::vector<double>(values.values().begin(), values.values().end()),
                  delta_snap) {}

ExponentMap ExponentMap::constant(const GridSpec& spec, double p, double delta_snap) {
  return ExponentMap(spec, std::vector<double>(static_cast<std::size_t>(spec.size()), p), delta_snap);
}

}  // namespace varlp
