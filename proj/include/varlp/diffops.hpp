#pragma once

#include <array>

#include "varlp/grid.hpp"

namespace varlp {

/// Per-component gradient of a 2-vector field (2x2 entries per cell):
/// row k holds the gradient of component k.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const GridSpec& spec) : r_{VectorField(spec), VectorField(spec)} {}
  TensorField(VectorField r0, VectorField r1);

  const GridSpec& spec() const { return r_[0].spec(); }
  VectorField& row(int k) { return r_[static_cast<std::size_t>(k)]; }
  const VectorField& row(int k) const { return r_[static_cast<std::size_t>(k)]; }

  /// Pointwise Frobenius norm.
  ScalarField norm_field() const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);

 private:
  std::array<VectorField, 2> r_;
};

double l2_inner(const TensorField& a, const TensorField& b);
double l2_norm(const TensorField& a);

/// Forward differences divided by the cell size; the last difference
/// along each axis is zero, so constants map to zero exactly.
VectorField gradient(const ScalarField& f);

/// Exact negative adjoint of gradient under the cell-area inner
/// product: l2_inner(gradient(f), g) == -l2_inner(f, divergence(g)).
ScalarField divergence(const VectorField& g);

/// Component-wise gradient of a vector field (not symmetrized).
TensorField vector_gradient(const VectorField& v);

/// Exact negative adjoint of vector_gradient.
VectorField tensor_divergence(const TensorField& t);

/// Sampled, normalized Gaussian kernel. sigma is in physical units;
/// taps are taken at cell-center offsets out to truncation*sigma.
struct KernelSpec {
  double sigma = 1.0;       // > 0
  double truncation = 4.0;  // >= 2, in units of sigma
  void validate() const;
};

/// Separable Gaussian smoothing with reflected (symmetric) boundary;
/// the kernel is normalized to sum 1, so constants are preserved.
ScalarField gaussian_smooth(const ScalarField& f, const KernelSpec& k);

/// Anisotropic variant used when the two axes need different widths.
ScalarField gaussian_smooth_axes(const ScalarField& f, double sigma_x, double sigma_y,
                                 double truncation = 4.0);

/// 5-point Laplacian with reflected boundary; exact zero on constants,
/// zero on affine inputs away from the boundary.
ScalarField laplacian(const ScalarField& f);

}  // namespace varlp
