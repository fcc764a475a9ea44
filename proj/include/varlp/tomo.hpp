#pragma once

#include <vector>

#include "varlp/grid.hpp"
#include "varlp/noise.hpp"

namespace varlp {

/// Fan-beam geometry with a flat detector, full circular scan.
/// Source i sits at source_radius * (cos b_i, sin b_i) with
/// b_i = 2*pi*i/num_angles; the detector line sits opposite at distance
/// detector_radius from the origin, spanning detector_extent.
struct FanBeamGeometry {
  int num_angles = 180;
  int num_detectors = 192;
  double source_radius = 0.0;
  double detector_radius = 0.0;
  double detector_extent = 0.0;

  double angle(int i) const;
  double detector_cell() const { return detector_extent / num_detectors; }
  /// Signed offset of detector cell center k along the detector line.
  double detector_offset(int k) const;
  /// Angular x detector quadrature weight of one sinogram sample.
  double sample_weight() const;

  /// Checks positivity, that the source circle stays outside the image
  /// circumradius, and that the detector is wide enough that every
  /// point of the image disk projects onto it from every source.
  void validate(const GridSpec& image) const;

  bool operator==(const FanBeamGeometry&) const = default;
};

/// 180 angles x 192 cells, source at twice the image circumradius,
/// detector sized to cover the image disk with a small margin.
FanBeamGeometry default_fan_geometry(const GridSpec& image, int num_angles = 180,
                                     int num_detectors = 192);

/// Fan-beam measurements: num_angles x num_detectors samples, row-major.
class Sinogram {
 public:
  Sinogram() = default;
  explicit Sinogram(const FanBeamGeometry& geom, double fill = 0.0);
  Sinogram(const FanBeamGeometry& geom, std::vector<double> values);

  const FanBeamGeometry& geometry() const { return geom_; }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }
  double& at(int angle, int det) { return v_[static_cast<std::size_t>(angle) * static_cast<std::size_t>(geom_.num_detectors) + static_cast<std::size_t>(det)]; }
  double at(int angle, int det) const { return v_[static_cast<std::size_t>(angle) * static_cast<std::size_t>(geom_.num_detectors) + static_cast<std::size_t>(det)]; }
  double& operator[](std::int64_t k) { return v_[static_cast<std::size_t>(k)]; }
  double operator[](std::int64_t k) const { return v_[static_cast<std::size_t>(k)]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  /// View as a field (rows = angles) for serialization and noise.
  ScalarField as_field() const;

 private:
  FanBeamGeometry geom_;
  std::vector<double> v_;
};

/// Weighted inner product matching the sinogram quadrature.
double l2_inner(const Sinogram& a, const Sinogram& b);
double l2_norm(const Sinogram& a);

struct SinogramNoiseResult {
  Sinogram sinogram;
  bool degenerate_range = false;
};
SinogramNoiseResult add_noise(const Sinogram& s, const NoiseSpec& spec);

/// Line integrals by fixed-step sampling: each source->detector-cell ray
/// is clipped to the image extent and sampled at half the smaller cell
/// size with bilinear interpolation. Linear in f.
Sinogram forward(const ScalarField& f, const FanBeamGeometry& geom);

/// Exact transpose of forward, rescaled by the quadrature weight ratio
/// so that l2_inner(forward(f), s) == l2_inner(f, adjoint(s)).
ScalarField adjoint(const Sinogram& s, const GridSpec& image);

struct FbpConfig {
  enum class Filter { ram_lak, hann };
  Filter filter = Filter::ram_lak;
  double cutoff = 1.0;  // fraction of the detector Nyquist frequency, (0,1]
  void validate() const;
};

/// Filtered backprojection: cosine weighting, band-limited ramp filter
/// (optionally Hann windowed) applied per angle via FFT, then weighted
/// backprojection with the half factor for the full-scan redundancy.
ScalarField fbp(const Sinogram& s, const FbpConfig& cfg, const GridSpec& image);

}  // namespace varlp
