#include "varlp/exponent_builder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "varlp/diffops.hpp"

namespace varlp {

void ExponentRecipe::validate() const {
  if (!(sigma1_cells > 0.0) || !(sigma2_cells > sigma1_cells))
    throw std::invalid_argument("ExponentRecipe: need sigma2 > sigma1 > 0");
  if (clip_scale && !(*clip_scale > 0.0))
    throw std::invalid_argument("ExponentRecipe: clip_scale must be > 0");
  if (!(auto_percentile > 0.0) || !(auto_percentile < 1.0))
    throw std::invalid_argument("ExponentRecipe: auto_percentile must lie in (0,1)");
  if (!(truncation >= 2.0))
    throw std::invalid_argument("ExponentRecipe: truncation must be >= 2");
}

namespace {

// Nearest-rank percentile of a copy of the values.
double percentile(std::span<const double> v, double q) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * n));
  idx = idx > 0 ? idx - 1 : 0;
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

ExponentStages build_exponent_stages(const ScalarField& f, const ExponentRecipe& recipe) {
  recipe.validate();
  const GridSpec& s = f.spec();
  const double hx = s.cell_width(), hy = s.cell_height();

  ScalarField l = laplacian(
      gaussian_smooth_axes(f, recipe.sigma1_cells * hx, recipe.sigma1_cells * hy, recipe.truncation));
  ScalarField abs_l = l;
  for (std::int64_t k = 0; k < abs_l.size(); ++k) abs_l[k] = std::abs(abs_l[k]);
  ScalarField a = gaussian_smooth_axes(abs_l, recipe.sigma2_cells * hx, recipe.sigma2_cells * hy,
                                       recipe.truncation);

  double c;
  if (recipe.clip_scale) {
    c = *recipe.clip_scale;
  } else {
    const double ref = percentile(a.values(), recipe.auto_percentile);
    c = ref > 0.0 ? 1.0 / ref : 0.0;  // flat input: leave t at 0, p at 2
  }

  ScalarField t(s);
  std::vector<double> p(static_cast<std::size_t>(s.size()));
  for (std::int64_t k = 0; k < s.size(); ++k) {
    t[k] = std::min(c * a[k], 1.0);
    p[static_cast<std::size_t>(k)] = 2.0 - t[k];
  }
  ExponentMap map(s, std::move(p), recipe.delta_snap);
  return {std::move(l), std::move(a), std::move(t), std::move(map), c};
}

ExponentMap build_exponent(const ScalarField& f, const ExponentRecipe& recipe) {
  return build_exponent_stages(f, recipe).exponent;
}

ExponentMap bootstrap_exponent(const ScalarField& data, const ExponentRecipe& recipe) {
  return build_exponent(data, recipe);
}

ExponentMap bootstrap_exponent(const Sinogram& data, const FbpConfig& fbp_cfg,
                               const GridSpec& image, const ExponentRecipe& recipe) {
  return build_exponent(fbp(data, fbp_cfg, image), recipe);
}

ExponentMap bimodal_exponent(const Sinogram& secondary, const FbpConfig& fbp_cfg,
                             const GridSpec& image, const ExponentRecipe& recipe) {
  return build_exponent(fbp(secondary, fbp_cfg, image), recipe);
}

}  // namespace varlp
