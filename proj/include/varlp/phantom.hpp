#pragma once

#include "varlp/grid.hpp"

namespace varlp {

/// Test image on [-10,10]^2: f(x,y) = x inside the closed square
/// [-5,5]^2 and 0 outside, sampled at cell centers. Combines jump
/// discontinuities (vertical edges), a linear ramp, and flat regions.
/// Throws if the spec extent is not [-10,10]^2.
ScalarField square_phantom(const GridSpec& spec);

}  // namespace varlp
