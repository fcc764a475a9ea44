#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace varlp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Rectangular cell-centered grid: rows x cols cells covering
/// [x0,x1] x [y0,y1]. Cell (i,j) is centered at
/// (x0 + (j+1/2)*cell_width, y0 + (i+1/2)*cell_height), row-major storage.
struct GridSpec {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  double x0 = 0.0, x1 = 0.0;
  double y0 = 0.0, y1 = 0.0;

  GridSpec() = default;
  GridSpec(std::int64_t rows, std::int64_t cols, double x0, double x1, double y0, double y1);

  /// Pixel-style grid with unit cells, extent [0,cols] x [0,rows].
  static GridSpec unit_cells(std::int64_t rows, std::int64_t cols);
  /// n x n grid on [-half_extent, half_extent]^2.
  static GridSpec square(std::int64_t n, double half_extent);

  std::int64_t size() const { return rows * cols; }
  double cell_width() const { return (x1 - x0) / static_cast<double>(cols); }
  double cell_height() const { return (y1 - y0) / static_cast<double>(rows); }
  double cell_area() const { return cell_width() * cell_height(); }
  Point cell_center(std::int64_t i, std::int64_t j) const {
    return {x0 + (static_cast<double>(j) + 0.5) * cell_width(),
            y0 + (static_cast<double>(i) + 0.5) * cell_height()};
  }
  /// Max distance from the origin to an extent corner.
  double circumradius() const;

  bool operator==(const GridSpec&) const = default;
};

/// Scalar function sampled at cell centers, 64-bit floats.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& spec, double fill = 0.0);
  /// Takes ownership of values; size must match spec and entries must be finite.
  ScalarField(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::int64_t size() const { return spec_.size(); }
  std::int64_t rows() const { return spec_.rows; }
  std::int64_t cols() const { return spec_.cols; }

  double& operator[](std::int64_t k) { return v_[static_cast<std::size_t>(k)]; }
  double operator[](std::int64_t k) const { return v_[static_cast<std::size_t>(k)]; }
  double& at(std::int64_t i, std::int64_t j) { return v_[static_cast<std::size_t>(i * spec_.cols + j)]; }
  double at(std::int64_t i, std::int64_t j) const { return v_[static_cast<std::size_t>(i * spec_.cols + j)]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  double minimum() const;
  double maximum() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  GridSpec spec_;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Sum of a*b over cells, weighted by cell area (discrete L2 inner product).
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);

/// Two-component field on a common grid (e.g. a discrete gradient).
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridSpec& spec);
  VectorField(ScalarField x, ScalarField y);

  const GridSpec& spec() const { return c_[0].spec(); }
  ScalarField& x() { return c_[0]; }
  const ScalarField& x() const { return c_[0]; }
  ScalarField& y() { return c_[1]; }
  const ScalarField& y() const { return c_[1]; }
  ScalarField& comp(int k) { return c_[static_cast<std::size_t>(k)]; }
  const ScalarField& comp(int k) const { return c_[static_cast<std::size_t>(k)]; }

  /// Pointwise Euclidean norm.
  ScalarField norm_field() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);

 private:
  std::array<ScalarField, 2> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

double l2_inner(const VectorField& a, const VectorField& b);
double l2_norm(const VectorField& a);

/// Enforces matching grids; throws std::invalid_argument.
void require_same_spec(const GridSpec& a, const GridSpec& b, const char* where);

}  // namespace varlp
