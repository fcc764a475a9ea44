#pragma once

#include <optional>

#include "varlp/exponent_map.hpp"
#include "varlp/grid.hpp"
#include "varlp/tomo.hpp"

namespace varlp {

/// Edge-detector recipe that turns an image into an exponent map:
///   l = laplacian(gaussian(f, sigma1))      smoothed second-order response
///   a = gaussian(|l|, sigma2)               aggregated edge strength
///   t = min(clip_scale * a, 1)
///   p = 2 - t, then snapping near 1
/// Smoothing widths are given in cells. Without an explicit clip_scale
/// the scale is chosen so that the given percentile of a maps to t = 1.
struct ExponentRecipe {
  double sigma1_cells = 1.5;
  double sigma2_cells = 5.0;  // must exceed sigma1_cells
  std::optional<double> clip_scale;  // > 0 when given
  double auto_percentile = 0.95;
  double truncation = 4.0;
  double delta_snap = ExponentMap::default_snap;
  void validate() const;
};

struct ExponentStages {
  ScalarField smoothed_laplacian;  // l
  ScalarField edge_strength;       // a
  ScalarField clipped;             // t
  ExponentMap exponent;            // p after snapping
  double clip_scale_used = 0.0;
};

ExponentStages build_exponent_stages(const ScalarField& f, const ExponentRecipe& recipe);
ExponentMap build_exponent(const ScalarField& f, const ExponentRecipe& recipe);

/// Denoising bootstrap: the data already lives in image space.
ExponentMap bootstrap_exponent(const ScalarField& data, const ExponentRecipe& recipe);

/// Tomography bootstrap: build the map from an FBP reconstruction of
/// the measured sinogram.
ExponentMap bootstrap_exponent(const Sinogram& data, const FbpConfig& fbp_cfg,
                               const GridSpec& image, const ExponentRecipe& recipe);

/// Bimodal variant: the map comes from a second, low-noise channel of
/// the same object, reconstructed with FBP.
ExponentMap bimodal_exponent(const Sinogram& secondary, const FbpConfig& fbp_cfg,
                             const GridSpec& image, const ExponentRecipe& recipe);

}  // namespace varlp
