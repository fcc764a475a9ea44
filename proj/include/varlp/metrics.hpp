#pragma once

#include "varlp/grid.hpp"

namespace varlp {

/// Mean squared error between f and ref.
double mse(const ScalarField& f, const ScalarField& ref);

/// 10*log10(range(ref)^2 / MSE); returns +infinity when the fields agree
/// exactly. The reference must have nonzero dynamic range.
double psnr(const ScalarField& f, const ScalarField& ref);

}  // namespace varlp
