#pragma once

#include <cstdint>

#include "varlp/grid.hpp"

namespace varlp {

/// Additive white Gaussian noise with standard deviation
/// level * (max(f) - min(f)).
struct NoiseSpec {
  double level = 0.0;  // >= 0, relative to the dynamic range
  std::uint64_t seed = 0;
};

struct NoiseResult {
  ScalarField field;
  /// Set when level > 0 but the input has zero dynamic range; the
  /// field is then returned unchanged.
  bool degenerate_range = false;
};

/// Draws from mt19937_64 via the Box-Muller transform so that the
/// sample sequence is fixed by the seed across platforms.
NoiseResult add_noise(const ScalarField& f, const NoiseSpec& spec);

}  // namespace varlp
