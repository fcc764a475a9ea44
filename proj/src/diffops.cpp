#include "varlp/diffops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "varlp/parallel.hpp"

namespace varlp {

TensorField::TensorField(VectorField r0, VectorField r1) : r_{std::move(r0), std::move(r1)} {
  require_same_spec(r_[0].spec(), r_[1].spec(), "TensorField");
}

ScalarField TensorField::norm_field() const {
  ScalarField out(spec());
  const std::int64_t n = out.size();
  for (std::int64_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (int r = 0; r < 2; ++r) {
      const double a = r_[static_cast<std::size_t>(r)].x()[k];
      const double b = r_[static_cast<std::size_t>(r)].y()[k];
      s += a * a + b * b;
    }
    out[k] = std::sqrt(s);
  }
  return out;
}

TensorField& TensorField::operator+=(const TensorField& o) {
  r_[0] += o.r_[0];
  r_[1] += o.r_[1];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  r_[0] -= o.r_[0];
  r_[1] -= o.r_[1];
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  r_[0] *= s;
  r_[1] *= s;
  return *this;
}

double l2_inner(const TensorField& a, const TensorField& b) {
  return l2_inner(a.row(0), b.row(0)) + l2_inner(a.row(1), b.row(1));
}

double l2_norm(const TensorField& a) { return std::sqrt(l2_inner(a, a)); }

VectorField gradient(const ScalarField& f) {
  const GridSpec& s = f.spec();
  VectorField g(s);
  const double inv_hx = 1.0 / s.cell_width();
  const double inv_hy = 1.0 / s.cell_height();
  parallel_for(s.rows, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < s.cols; ++j) {
      g.x().at(i, j) = j + 1 < s.cols ? (f.at(i, j + 1) - f.at(i, j)) * inv_hx : 0.0;
      g.y().at(i, j) = i + 1 < s.rows ? (f.at(i + 1, j) - f.at(i, j)) * inv_hy : 0.0;
    }
  });
  return g;
}

ScalarField divergence(const VectorField& g) {
  const GridSpec& s = g.spec();
  ScalarField d(s);
  const double inv_hx = 1.0 / s.cell_width();
  const double inv_hy = 1.0 / s.cell_height();
  const ScalarField& gx = g.x();
  const ScalarField& gy = g.y();
  // transpose of the forward-difference stencil; the last column/row of
  // the input never contributes because gradient writes zeros there
  parallel_for(s.rows, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < s.cols; ++j) {
      double v = 0.0;
      if (j + 1 < s.cols) v += gx.at(i, j) * inv_hx;
      if (j > 0) v -= gx.at(i, j - 1) * inv_hx;
      if (i + 1 < s.rows) v += gy.at(i, j) * inv_hy;
      if (i > 0) v -= gy.at(i - 1, j) * inv_hy;
      d.at(i, j) = v;
    }
  });
  return d;
}

TensorField vector_gradient(const VectorField& v) {
  return TensorField(gradient(v.x()), gradient(v.y()));
}

VectorField tensor_divergence(const TensorField& t) {
  return VectorField(divergence(t.row(0)), divergence(t.row(1)));
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("KernelSpec: sigma must be finite and > 0");
  if (!(truncation >= 2.0) || !std::isfinite(truncation))
    throw std::invalid_argument("KernelSpec: truncation must be finite and >= 2");
}

namespace {

// Half-sample symmetric reflection of i into [0, n).
std::int64_t reflect(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> sampled_kernel(double sigma, double trunc, double h) {
  const auto radius = static_cast<std::int64_t>(std::ceil(trunc * sigma / h));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::int64_t m = -radius; m <= radius; ++m) {
    const double x = static_cast<double>(m) * h;
    const double v = std::exp(-0.5 * x * x / (sigma * sigma));
    w[static_cast<std::size_t>(m + radius)] = v;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

ScalarField gaussian_smooth_axes(const ScalarField& f, double sigma_x, double sigma_y,
                                 double truncation) {
  KernelSpec{sigma_x, truncation}.validate();
  KernelSpec{sigma_y, truncation}.validate();
  const GridSpec& s = f.spec();
  const std::vector<double> wx = sampled_kernel(sigma_x, truncation, s.cell_width());
  const std::vector<double> wy = sampled_kernel(sigma_y, truncation, s.cell_height());
  const std::int64_t rx = (static_cast<std::int64_t>(wx.size()) - 1) / 2;
  const std::int64_t ry = (static_cast<std::int64_t>(wy.size()) - 1) / 2;

  ScalarField tmp(s);
  parallel_for(s.rows, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < s.cols; ++j) {
      double acc = 0.0;
      for (std::int64_t m = -rx; m <= rx; ++m)
        acc += wx[static_cast<std::size_t>(m + rx)] * f.at(i, reflect(j + m, s.cols));
      tmp.at(i, j) = acc;
    }
  });
  ScalarField out(s);
  parallel_for(s.rows, [&](std::int64_t i) {
    for (std::int64_t j = 0; j < s.cols; ++j) {
      double acc = 0.0;
      for (std::int64_t m = -ry; m <= ry; ++m)
        acc += wy[static_cast<std::size_t>(m + ry)] * tmp.at(reflect(i + m, s.rows), j);
      out.at(i, j) = acc;
    }
  });
  return out;
}

ScalarField gaussian_smooth(const ScalarField& f, const KernelSpec& k) {
  k.validate();
  return gaussian_smooth_axes(f, k.sigma, k.sigma, k.truncation);
}

ScalarField laplacian(const ScalarField& f) {
  const GridSpec& s = f.spec();
  ScalarField out(s);
  const double inv_hx2 = 1.0 / (s.cell_width() * s.cell_width());
  const double inv_hy2 = 1.0 / (s.cell_height() * s.cell_height());
  parallel_for(s.rows, [&](std::int64_t i) {
    const std::int64_t in = reflect(i + 1, s.rows);
    const std::int64_t is = reflect(i - 1, s.rows);
    for (std::int64_t j = 0; j < s.cols; ++j) {
      const std::int64_t je = reflect(j + 1, s.cols);
      const std::int64_t jw = reflect(j - 1, s.cols);
      out.at(i, j) = (f.at(i, je) + f.at(i, jw) - 2.0 * f.at(i, j)) * inv_hx2 +
                     (f.at(in, j) + f.at(is, j) - 2.0 * f.at(i, j)) * inv_hy2;
    }
  });
  return out;
}

}  // namespace varlp
