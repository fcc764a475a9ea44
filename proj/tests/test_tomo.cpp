#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "varlp/grid.hpp"
#include "varlp/tomo.hpp"

using namespace varlp;

namespace {

ScalarField random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField f(spec);
  for (std::int64_t k = 0; k < f.size(); ++k)
    f[k] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return f;
}

Sinogram random_sinogram(const FanBeamGeometry& geom, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Sinogram s(geom);
  for (std::int64_t k = 0; k < s.size(); ++k)
    s[k] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return s;
}

// Length of the segment src -> dst inside the axis-aligned rectangle,
// via explicit per-edge parameter intervals (independent of the slab
// walk used by the forward projector).
double segment_in_rect(double sx, double sy, double dx, double dy, const GridSpec& g) {
  const double vx = dx - sx, vy = dy - sy;
  double t_lo = 0.0, t_hi = 1.0;
  const auto clip = [&](double v, double s, double lo, double hi) {
    if (v == 0.0) return s >= lo && s <= hi;
    double a = (lo - s) / v, b = (hi - s) / v;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
    return true;
  };
  if (!clip(vx, sx, g.x0, g.x1)) return 0.0;
  if (!clip(vy, sy, g.y0, g.y1)) return 0.0;
  if (t_hi <= t_lo) return 0.0;
  return (t_hi - t_lo) * std::hypot(vx, vy);
}

}  // namespace

TEST_SUITE_BEGIN("tomo");

TEST_CASE("geometry accessors and validation") {
  const GridSpec spec(16, 16, -10, 10, -10, 10);
  const FanBeamGeometry geom = default_fan_geometry(spec, 90, 96);
  CHECK(geom.num_angles == 90);
  CHECK(geom.source_radius == doctest::Approx(2.0 * std::sqrt(200.0)));
  CHECK(geom.angle(0) == 0.0);
  CHECK(geom.angle(45) == doctest::Approx(std::numbers::pi));
  CHECK(geom.detector_cell() == doctest::Approx(geom.detector_extent / 96));
  // Offsets are centered: first and last mirror each other.
  CHECK(geom.detector_offset(0) == doctest::Approx(-geom.detector_offset(95)));
  geom.validate(spec);

  FanBeamGeometry bad = geom;
  bad.source_radius = 0.5 * spec.circumradius();  // source inside the image disk
  CHECK_THROWS_AS(bad.validate(spec), std::invalid_argument);
  bad = geom;
  bad.detector_extent *= 0.5;  // too short to cover the disk
  CHECK_THROWS_AS(bad.validate(spec), std::invalid_argument);
  bad = geom;
  bad.num_angles = 0;
  CHECK_THROWS_AS(bad.validate(spec), std::invalid_argument);
}

TEST_CASE("sinogram field view and weighted norm") {
  const GridSpec spec(8, 8, -1, 1, -1, 1);
  const FanBeamGeometry geom = default_fan_geometry(spec, 10, 12);
  const Sinogram ones(geom, 1.0);

  const ScalarField f = ones.as_field();
  CHECK(f.spec().rows == 10);
  CHECK(f.spec().cols == 12);
  CHECK(f.spec().x0 == doctest::Approx(-0.5 * geom.detector_extent));
  CHECK(f.spec().y1 == doctest::Approx(2.0 * std::numbers::pi));

  // Quadrature weight: (2 pi / angles) * (extent / detectors) per cell.
  CHECK(l2_inner(ones, ones) ==
        doctest::Approx(2.0 * std::numbers::pi * geom.detector_extent).epsilon(1e-12));
}

TEST_CASE("forward of a constant equals the chord length") {
  const GridSpec spec(16, 16, -2, 2, -1, 2);
  const FanBeamGeometry geom = default_fan_geometry(spec, 20, 24);
  const Sinogram sino = forward(ScalarField(spec, 1.0), geom);
  for (int a = 0; a < geom.num_angles; ++a) {
    const double beta = geom.angle(a);
    const double sx = geom.source_radius * std::cos(beta);
    const double sy = geom.source_radius * std::sin(beta);
    for (int d = 0; d < geom.num_detectors; ++d) {
      // Detector cell center: opposite the source, offset along the
      // perpendicular direction.
      const double off = geom.detector_offset(d);
      const double dx = -geom.detector_radius * std::cos(beta) - off * std::sin(beta);
      const double dy = -geom.detector_radius * std::sin(beta) + off * std::cos(beta);
      const double chord = segment_in_rect(sx, sy, dx, dy, spec);
      CHECK(sino.at(a, d) == doctest::Approx(chord).epsilon(1e-9));
    }
  }
}

TEST_CASE("forward is linear") {
  const GridSpec spec(12, 12, -3, 3, -3, 3);
  const FanBeamGeometry geom = default_fan_geometry(spec, 15, 16);
  const ScalarField f = random_field(spec, 5);
  const ScalarField g = random_field(spec, 6);
  ScalarField combo = 2.0 * f;
  ScalarField g3 = 3.0 * g;
  combo += g3;

  const Sinogram sf = forward(f, geom);
  const Sinogram sg = forward(g, geom);
  const Sinogram sc = forward(combo, geom);
  for (std::int64_t k = 0; k < sc.size(); ++k)
    CHECK(sc[k] == doctest::Approx(2.0 * sf[k] + 3.0 * sg[k]).epsilon(1e-11));

  const Sinogram zero = forward(ScalarField(spec), geom);
  for (std::int64_t k = 0; k < zero.size(); ++k) CHECK(zero[k] == 0.0);
}

TEST_CASE("adjoint matches the forward inner product") {
  const GridSpec spec(14, 11, -2, 2, -2, 2);
  const FanBeamGeometry geom = default_fan_geometry(spec, 18, 20);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ScalarField f = random_field(spec, 900 + seed);
    const Sinogram s = random_sinogram(geom, 800 + seed);
    const double lhs = l2_inner(forward(f, geom), s);
    const double rhs = l2_inner(f, adjoint(s, spec));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("fbp reconstructs a smooth blob") {
  const GridSpec spec(64, 64, -10, 10, -10, 10);
  ScalarField blob(spec);
  for (std::int64_t i = 0; i < spec.rows; ++i)
    for (std::int64_t j = 0; j < spec.cols; ++j) {
      const Point c = spec.cell_center(i, j);
      blob.at(i, j) = std::exp(-(c.x * c.x + c.y * c.y) / 8.0);
    }
  const FanBeamGeometry geom = default_fan_geometry(spec, 180, 128);
  const Sinogram sino = forward(blob, geom);

  FbpConfig cfg;
  const ScalarField recon = fbp(sino, cfg, spec);
  double err = 0.0, ref = 0.0;
  for (std::int64_t k = 0; k < spec.size(); ++k) {
    err += (recon[k] - blob[k]) * (recon[k] - blob[k]);
    ref += blob[k] * blob[k];
  }
  CHECK(err / ref < 0.01);  // a few percent relative L2 error

  const ScalarField flat = fbp(Sinogram(geom), cfg, spec);
  CHECK(l2_norm(flat) == 0.0);
}

TEST_CASE("fbp config validation") {
  FbpConfig cfg;
  cfg.cutoff = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.cutoff = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("sinogram noise is seeded") {
  const GridSpec spec(8, 8, -1, 1, -1, 1);
  const FanBeamGeometry geom = default_fan_geometry(spec, 6, 8);
  const Sinogram s = random_sinogram(geom, 31);

  const SinogramNoiseResult a = add_noise(s, {0.05, 9});
  const SinogramNoiseResult b = add_noise(s, {0.05, 9});
  CHECK(!a.degenerate_range);
  bool same = true;
  for (std::int64_t k = 0; k < s.size(); ++k) same = same && a.sinogram[k] == b.sinogram[k];
  CHECK(same);

  const SinogramNoiseResult flat = add_noise(Sinogram(geom, 2.0), {0.05, 9});
  CHECK(flat.degenerate_range);
}

TEST_SUITE_END();
