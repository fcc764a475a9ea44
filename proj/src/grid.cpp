#include "varlp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace varlp {

void require_same_spec(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid specs differ");
}

GridSpec::GridSpec(std::int64_t rows_, std::int64_t cols_, double ax0, double ax1, double ay0, double ay1)
    : rows(rows_), cols(cols_), x0(ax0), x1(ax1), y0(ay0), y1(ay1) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("GridSpec: cell counts must be positive");
  if (!(std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1)))
    throw std::invalid_argument("GridSpec: extent must be finite");
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("GridSpec: extent must have positive measure");
}

GridSpec GridSpec::unit_cells(std::int64_t rows, std::int64_t cols) {
  return GridSpec(rows, cols, 0.0, static_cast<double>(cols), 0.0, static_cast<double>(rows));
}

GridSpec GridSpec::square(std::int64_t n, double half_extent) {
  return GridSpec(n, n, -half_extent, half_extent, -half_extent, half_extent);
}

double GridSpec::circumradius() const {
  const double mx = std::max(std::abs(x0), std::abs(x1));
  const double my = std::max(std::abs(y0), std::abs(y1));
  return std::hypot(mx, my);
}

ScalarField::ScalarField(const GridSpec& spec, double fill)
    : spec_(spec), v_(static_cast<std::size_t>(spec.size()), fill) {
  if (spec_.size() == 0) throw std::invalid_argument("ScalarField: empty spec");
}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), v_(std::move(values)) {
  if (static_cast<std::int64_t>(v_.size()) != spec_.size())
    throw std::invalid_argument("ScalarField: value count does not match spec");
  for (double x : v_)
    if (!std::isfinite(x)) throw std::invalid_argument("ScalarField: non-finite entry");
}

double ScalarField::minimum() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::maximum() const { return *std::max_element(v_.begin(), v_.end()); }

bool ScalarField::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_spec(spec_, o.spec_, "ScalarField::operator+=");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_spec(spec_, o.spec_, "ScalarField::operator-=");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double l2_inner(const ScalarField& a, const ScalarField& b) {
  require_same_spec(a.spec(), b.spec(), "l2_inner");
  double s = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  const std::int64_t n = a.size();
  for (std::int64_t k = 0; k < n; ++k) s += pa[k] * pb[k];
  return s * a.spec().cell_area();
}

double l2_norm(const ScalarField& a) { return std::sqrt(l2_inner(a, a)); }

VectorField::VectorField(const GridSpec& spec) : c_{ScalarField(spec), ScalarField(spec)} {}

VectorField::VectorField(ScalarField x, ScalarField y) : c_{std::move(x), std::move(y)} {
  require_same_spec(c_[0].spec(), c_[1].spec(), "VectorField");
}

ScalarField VectorField::norm_field() const {
  ScalarField out(spec());
  const std::int64_t n = out.size();
  for (std::int64_t k = 0; k < n; ++k) out[k] = std::sqrt(c_[0][k] * c_[0][k] + c_[1][k] * c_[1][k]);
  return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  c_[0] += o.c_[0];
  c_[1] += o.c_[1];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  c_[0] -= o.c_[0];
  c_[1] -= o.c_[1];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  c_[0] *= s;
  c_[1] *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double l2_inner(const VectorField& a, const VectorField& b) {
  return l2_inner(a.x(), b.x()) + l2_inner(a.y(), b.y());
}

double l2_norm(const VectorField& a) { return std::sqrt(l2_inner(a, a)); }

}  // namespace varlp
