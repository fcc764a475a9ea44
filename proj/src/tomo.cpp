#include "varlp/tomo.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "varlp/parallel.hpp"

namespace varlp {

namespace {
constexpr double kPi = std::numbers::pi;
}

double FanBeamGeometry::angle(int i) const {
  return 2.0 * kPi * static_cast<double>(i) / static_cast<double>(num_angles);
}

double FanBeamGeometry::detector_offset(int k) const {
  return (static_cast<double>(k) + 0.5 - 0.5 * static_cast<double>(num_detectors)) * detector_cell();
}

double FanBeamGeometry::sample_weight() const {
  return (2.0 * kPi / static_cast<double>(num_angles)) * detector_cell();
}

void FanBeamGeometry::validate(const GridSpec& image) const {
  if (num_angles < 1 || num_detectors < 1)
    throw std::invalid_argument("FanBeamGeometry: angle and detector counts must be positive");
  if (!(source_radius > 0.0) || !(detector_radius > 0.0) || !(detector_extent > 0.0))
    throw std::invalid_argument("FanBeamGeometry: radii and detector extent must be positive");
  const double r = image.circumradius();
  if (!(source_radius > r))
    throw std::invalid_argument("FanBeamGeometry: source circle must lie outside the image disk");
  // widest projection of the image disk onto the detector line
  const double needed = (source_radius + detector_radius) * r /
                        std::sqrt(source_radius * source_radius - r * r);
  if (detector_extent * 0.5 < needed * (1.0 - 1e-9))
    throw std::invalid_argument("FanBeamGeometry: detector does not cover the image disk");
}

FanBeamGeometry default_fan_geometry(const GridSpec& image, int num_angles, int num_detectors) {
  FanBeamGeometry g;
  g.num_angles = num_angles;
  g.num_detectors = num_detectors;
  const double r = image.circumradius();
  g.source_radius = 2.0 * r;
  g.detector_radius = g.source_radius;
  g.detector_extent =
      2.0 * 1.05 * (g.source_radius + g.detector_radius) * r /
      std::sqrt(g.source_radius * g.source_radius - r * r);
  g.validate(image);
  return g;
}

Sinogram::Sinogram(const FanBeamGeometry& geom, double fill)
    : geom_(geom),
      v_(static_cast<std::size_t>(geom.num_angles) * static_cast<std::size_t>(geom.num_detectors),
         fill) {
  if (geom.num_angles < 1 || geom.num_detectors < 1)
    throw std::invalid_argument("Sinogram: invalid geometry");
}

Sinogram::Sinogram(const FanBeamGeometry& geom, std::vector<double> values)
    : geom_(geom), v_(std::move(values)) {
  const auto expected =
      static_cast<std::size_t>(geom.num_angles) * static_cast<std::size_t>(geom.num_detectors);
  if (v_.size() != expected) throw std::invalid_argument("Sinogram: value count does not match geometry");
}

ScalarField Sinogram::as_field() const {
  const GridSpec s(geom_.num_angles, geom_.num_detectors, -0.5 * geom_.detector_extent,
                   0.5 * geom_.detector_extent, 0.0, 2.0 * kPi);
  return ScalarField(s, v_);
}

double l2_inner(const Sinogram& a, const Sinogram& b) {
  if (!(a.geometry() == b.geometry())) throw std::invalid_argument("l2_inner: sinogram geometries differ");
  double s = 0.0;
  const std::int64_t n = a.size();
  for (std::int64_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s * a.geometry().sample_weight();
}

double l2_norm(const Sinogram& a) { return std::sqrt(l2_inner(a, a)); }

SinogramNoiseResult add_noise(const Sinogram& s, const NoiseSpec& spec) {
  NoiseResult r = add_noise(s.as_field(), spec);
  const auto span = r.field.values();
  return {Sinogram(s.geometry(), std::vector<double>(span.begin(), span.end())), r.degenerate_range};
}

namespace {

struct Ray {
  double sx, sy;    // source position
  double dx, dy;    // unit direction toward the detector cell
  double t0 = 0.0;  // entry/exit parameters of the extent, t1 <= t0 means a miss
  double t1 = 0.0;
  double dt = 0.0;
  std::int64_t nsteps = 0;
};

Ray make_ray(const FanBeamGeometry& g, const GridSpec& s, int ia, int k) {
  Ray r{};
  const double beta = g.angle(ia);
  const double ex = std::cos(beta), ey = std::sin(beta);
  const double ux = -ey, uy = ex;
  r.sx = g.source_radius * ex;
  r.sy = g.source_radius * ey;
  const double t = g.detector_offset(k);
  const double px = -g.detector_radius * ex + t * ux;
  const double py = -g.detector_radius * ey + t * uy;
  double dx = px - r.sx, dy = py - r.sy;
  const double len = std::hypot(dx, dy);
  dx /= len;
  dy /= len;
  r.dx = dx;
  r.dy = dy;

  double t0 = 0.0, t1 = len;
  const auto clip = [&](double origin, double dir, double lo, double hi) {
    if (std::abs(dir) < 1e-300) {
      if (origin < lo || origin > hi) t1 = t0 - 1.0;
      return;
    }
    double ta = (lo - origin) / dir;
    double tb = (hi - origin) / dir;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  };
  clip(r.sx, dx, s.x0, s.x1);
  clip(r.sy, dy, s.y0, s.y1);
  if (t1 <= t0) return r;  // nsteps stays 0

  const double step = 0.5 * std::min(s.cell_width(), s.cell_height());
  r.t0 = t0;
  r.t1 = t1;
  r.nsteps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((t1 - t0) / step)));
  r.dt = (t1 - t0) / static_cast<double>(r.nsteps);
  return r;
}

// Bilinear cell-center interpolation stencil at a physical position.
struct Stencil {
  std::int64_t i0, j0;
  double wx, wy;
};

Stencil stencil_at(const GridSpec& s, double px, double py) {
  double fx = (px - s.x0) / s.cell_width() - 0.5;
  double fy = (py - s.y0) / s.cell_height() - 0.5;
  auto j0 = static_cast<std::int64_t>(std::floor(fx));
  auto i0 = static_cast<std::int64_t>(std::floor(fy));
  double wx = fx - static_cast<double>(j0);
  double wy = fy - static_cast<double>(i0);
  if (j0 < 0) {
    j0 = 0;
    wx = 0.0;
  } else if (j0 > s.cols - 2) {
    j0 = s.cols - 2;
    wx = 1.0;
  }
  if (i0 < 0) {
    i0 = 0;
    wy = 0.0;
  } else if (i0 > s.rows - 2) {
    i0 = s.rows - 2;
    wy = 1.0;
  }
  return {i0, j0, wx, wy};
}

void check_image_spec(const GridSpec& s, const char* where) {
  if (s.rows < 2 || s.cols < 2)
    throw std::invalid_argument(std::string(where) + ": image must have at least 2x2 cells");
}

}  // namespace

Sinogram forward(const ScalarField& f, const FanBeamGeometry& geom) {
  const GridSpec& s = f.spec();
  check_image_spec(s, "forward");
  geom.validate(s);
  Sinogram out(geom);
  parallel_for(geom.num_angles, [&](std::int64_t ia) {
    for (int k = 0; k < geom.num_detectors; ++k) {
      const Ray ray = make_ray(geom, s, static_cast<int>(ia), k);
      double acc = 0.0;
      for (std::int64_t m = 0; m < ray.nsteps; ++m) {
        const double t = ray.t0 + (static_cast<double>(m) + 0.5) * ray.dt;
        const Stencil st = stencil_at(s, ray.sx + t * ray.dx, ray.sy + t * ray.dy);
        acc += (1.0 - st.wy) * ((1.0 - st.wx) * f.at(st.i0, st.j0) + st.wx * f.at(st.i0, st.j0 + 1)) +
               st.wy * ((1.0 - st.wx) * f.at(st.i0 + 1, st.j0) + st.wx * f.at(st.i0 + 1, st.j0 + 1));
      }
      out.at(static_cast<int>(ia), k) = acc * ray.dt;
    }
  });
  return out;
}

ScalarField adjoint(const Sinogram& sino, const GridSpec& image) {
  check_image_spec(image, "adjoint");
  const FanBeamGeometry& geom = sino.geometry();
  geom.validate(image);
  const double scale = geom.sample_weight() / image.cell_area();

  // per-chunk scatter buffers, reduced in chunk order for reproducibility
  const int nc = chunk_count(geom.num_angles);
  std::vector<std::vector<double>> buf(static_cast<std::size_t>(nc),
                                       std::vector<double>(static_cast<std::size_t>(image.size()), 0.0));
  parallel_chunks(geom.num_angles, [&](int c, std::int64_t b, std::int64_t e) {
    std::vector<double>& img = buf[static_cast<std::size_t>(c)];
    for (std::int64_t ia = b; ia < e; ++ia) {
      for (int k = 0; k < geom.num_detectors; ++k) {
        const Ray ray = make_ray(geom, image, static_cast<int>(ia), k);
        if (ray.nsteps == 0) continue;
        const double v = sino.at(static_cast<int>(ia), k) * ray.dt * scale;
        if (v == 0.0) continue;
        for (std::int64_t m = 0; m < ray.nsteps; ++m) {
          const double t = ray.t0 + (static_cast<double>(m) + 0.5) * ray.dt;
          const Stencil st = stencil_at(image, ray.sx + t * ray.dx, ray.sy + t * ray.dy);
          const std::size_t base = static_cast<std::size_t>(st.i0 * image.cols + st.j0);
          img[base] += (1.0 - st.wy) * (1.0 - st.wx) * v;
          img[base + 1] += (1.0 - st.wy) * st.wx * v;
          img[base + static_cast<std::size_t>(image.cols)] += st.wy * (1.0 - st.wx) * v;
          img[base + static_cast<std::size_t>(image.cols) + 1] += st.wy * st.wx * v;
        }
      }
    }
  });
  ScalarField out(image);
  for (const auto& img : buf)
    for (std::int64_t k = 0; k < image.size(); ++k) out[k] += img[static_cast<std::size_t>(k)];
  return out;
}

void FbpConfig::validate() const {
  if (!(cutoff > 0.0) || !(cutoff <= 1.0))
    throw std::invalid_argument("FbpConfig: cutoff must lie in (0,1]");
}

namespace {

// RAII around the FFTW buffers/plans used for row filtering.
struct RampFilter {
  std::size_t m;
  double* buf = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::vector<double> transfer;  // windowed ramp on the r2c bins

  RampFilter(std::size_t n, double ds, FbpConfig cfg) {
    m = 1;
    while (m < 2 * n) m *= 2;
    buf = fftw_alloc_real(m);
    spec = fftw_alloc_complex(m / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, buf, FFTW_ESTIMATE);

    // band-limited ramp impulse response, wrapped circularly
    std::vector<double> kernel(m, 0.0);
    kernel[0] = 0.25 / (ds * ds);
    for (std::size_t i = 1; i < m; ++i) {
      const std::size_t d = std::min(i, m - i);
      if (d % 2 == 1)
        kernel[i] = -1.0 / (kPi * kPi * static_cast<double>(d) * static_cast<double>(d) * ds * ds);
    }
    std::copy(kernel.begin(), kernel.end(), buf);
    fftw_execute(fwd);

    const double nyquist = 0.5 / ds;
    const double nu_c = cfg.cutoff * nyquist;
    transfer.resize(m / 2 + 1);
    for (std::size_t b = 0; b < transfer.size(); ++b) {
      const double nu = static_cast<double>(b) / (static_cast<double>(m) * ds);
      double w = nu <= nu_c ? 1.0 : 0.0;
      if (cfg.filter == FbpConfig::Filter::hann && w > 0.0)
        w = 0.5 * (1.0 + std::cos(kPi * nu / nu_c));
      // kernel is symmetric, its spectrum is real
      transfer[b] = spec[b][0] * w;
    }
  }

  ~RampFilter() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf);
    fftw_free(spec);
  }

  // In-place filtering of one weighted row (length n), result scaled by ds.
  void apply(std::vector<double>& row, double ds) {
    const std::size_t n = row.size();
    std::fill(buf, buf + m, 0.0);
    std::copy(row.begin(), row.end(), buf);
    fftw_execute(fwd);
    for (std::size_t b = 0; b < transfer.size(); ++b) {
      spec[b][0] *= transfer[b];
      spec[b][1] *= transfer[b];
    }
    fftw_execute(inv);
    const double norm = ds / static_cast<double>(m);  // fftw leaves the m factor in
    for (std::size_t k = 0; k < n; ++k) row[k] = buf[k] * norm;
  }
};

}  // namespace

ScalarField fbp(const Sinogram& sino, const FbpConfig& cfg, const GridSpec& image) {
  cfg.validate();
  check_image_spec(image, "fbp");
  const FanBeamGeometry& g = sino.geometry();
  g.validate(image);

  const auto nd = static_cast<std::size_t>(g.num_detectors);
  const double mag = g.source_radius / (g.source_radius + g.detector_radius);
  const double ds = g.detector_cell() * mag;  // spacing on the virtual detector through the origin
  const double rs = g.source_radius;

  // cosine weighting + ramp filtering, per angle
  std::vector<std::vector<double>> filtered(static_cast<std::size_t>(g.num_angles),
                                            std::vector<double>(nd));
  {
    RampFilter filter(nd, ds, cfg);
    std::vector<double> row(nd);
    for (int ia = 0; ia < g.num_angles; ++ia) {
      for (std::size_t k = 0; k < nd; ++k) {
        const double s = g.detector_offset(static_cast<int>(k)) * mag;
        row[k] = sino.at(ia, static_cast<int>(k)) * rs / std::sqrt(rs * rs + s * s);
      }
      filter.apply(row, ds);
      filtered[static_cast<std::size_t>(ia)] = row;
    }
  }

  const double dbeta = 2.0 * kPi / static_cast<double>(g.num_angles);
  ScalarField out(image);
  parallel_for(image.rows, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < image.cols; ++j) {
      const Point c = image.cell_center(i, j);
      double acc = 0.0;
      for (int ia = 0; ia < g.num_angles; ++ia) {
        const double beta = g.angle(ia);
        const double ex = std::cos(beta), ey = std::sin(beta);
        const double ell = rs - (c.x * ex + c.y * ey);  // distance along the central ray
        const double sv = rs * (c.x * -ey + c.y * ex) / ell;
        const double idx = sv / ds + 0.5 * static_cast<double>(nd) - 0.5;
        const auto k0 = static_cast<std::int64_t>(std::floor(idx));
        const double w = idx - static_cast<double>(k0);
        double q = 0.0;
        const std::vector<double>& frow = filtered[static_cast<std::size_t>(ia)];
        if (k0 >= 0 && k0 + 1 < static_cast<std::int64_t>(nd))
          q = (1.0 - w) * frow[static_cast<std::size_t>(k0)] + w * frow[static_cast<std::size_t>(k0) + 1];
        else if (k0 == -1)
          q = w * frow[0];
        else if (k0 + 1 == static_cast<std::int64_t>(nd))
          q = (1.0 - w) * frow[nd - 1];
        acc += (rs * rs / (ell * ell)) * q;
      }
      out.at(i, j) = 0.5 * dbeta * acc;  // half: every line is measured twice over the full scan
    }
  });
  return out;
}

}  // namespace varlp
