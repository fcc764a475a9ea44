#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "varlp/diffops.hpp"
#include "varlp/grid.hpp"

using namespace varlp;

namespace {

ScalarField random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField f(spec);
  for (std::int64_t k = 0; k < f.size(); ++k)
    f[k] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return f;
}

VectorField random_vector(const GridSpec& spec, std::uint64_t seed) {
  return VectorField(random_field(spec, seed), random_field(spec, seed + 1));
}

ScalarField coordinate_x(const GridSpec& spec) {
  ScalarField f(spec);
  for (std::int64_t i = 0; i < spec.rows; ++i)
    for (std::int64_t j = 0; j < spec.cols; ++j) f.at(i, j) = spec.cell_center(i, j).x;
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("diffops");

TEST_CASE("gradient of constants and ramps") {
  const GridSpec spec(6, 9, -2, 1, 0, 2);
  const VectorField gc = gradient(ScalarField(spec, 3.5));
  CHECK(l2_norm(gc) == 0.0);

  // f = x: unit slope in x, zero in y, except the zeroed last column.
  const VectorField gx = gradient(coordinate_x(spec));
  for (std::int64_t i = 0; i < spec.rows; ++i)
    for (std::int64_t j = 0; j < spec.cols; ++j) {
      const double want = j + 1 < spec.cols ? 1.0 : 0.0;
      CHECK(gx.x().at(i, j) == doctest::Approx(want).epsilon(1e-12));
      CHECK(gx.y().at(i, j) == doctest::Approx(0.0));
    }
}

TEST_CASE("divergence is the exact negative adjoint of gradient") {
  const GridSpec spec(7, 5, -1, 2, -3, 1);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const ScalarField f = random_field(spec, seed);
    const VectorField g = random_vector(spec, seed + 100);
    const double lhs = l2_inner(gradient(f), g);
    const double rhs = -l2_inner(f, divergence(g));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("tensor divergence is the exact negative adjoint of the vector gradient") {
  const GridSpec spec(5, 6, 0, 2, 0, 3);
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    const VectorField v = random_vector(spec, seed);
    TensorField t(random_vector(spec, seed + 50), random_vector(spec, seed + 60));
    const double lhs = l2_inner(vector_gradient(v), t);
    const double rhs = -l2_inner(v, tensor_divergence(t));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("tensor field norms") {
  const GridSpec spec = GridSpec::unit_cells(1, 1);
  TensorField t(spec);
  t.row(0).x()[0] = 1.0;
  t.row(0).y()[0] = 2.0;
  t.row(1).x()[0] = 2.0;
  t.row(1).y()[0] = 4.0;
  CHECK(t.norm_field()[0] == doctest::Approx(5.0));  // Frobenius
  CHECK(l2_inner(t, t) == doctest::Approx(25.0));
}

TEST_CASE("laplacian of smooth fields") {
  const GridSpec spec(12, 10, -1, 1, -1, 1);
  CHECK(l2_norm(laplacian(ScalarField(spec, 2.0))) == 0.0);

  // f = x is harmonic away from the reflecting boundary.
  const ScalarField lap = laplacian(coordinate_x(spec));
  for (std::int64_t i = 1; i + 1 < spec.rows; ++i)
    for (std::int64_t j = 1; j + 1 < spec.cols; ++j)
      CHECK(lap.at(i, j) == doctest::Approx(0.0));

  // Quadratic f = x^2 has constant laplacian 2 in the interior.
  ScalarField q(spec);
  for (std::int64_t i = 0; i < spec.rows; ++i)
    for (std::int64_t j = 0; j < spec.cols; ++j) {
      const double x = spec.cell_center(i, j).x;
      q.at(i, j) = x * x;
    }
  const ScalarField lq = laplacian(q);
  for (std::int64_t i = 1; i + 1 < spec.rows; ++i)
    for (std::int64_t j = 1; j + 1 < spec.cols; ++j)
      CHECK(lq.at(i, j) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("gaussian smoothing preserves constants and mass") {
  const GridSpec spec(17, 13, 0, 13, 0, 17);
  KernelSpec k;
  k.sigma = 1.7;

  const ScalarField smooth_const = gaussian_smooth(ScalarField(spec, 4.0), k);
  for (std::int64_t i = 0; i < spec.size(); ++i)
    CHECK(smooth_const[i] == doctest::Approx(4.0).epsilon(1e-12));

  // A centered impulse keeps its mass when the kernel fits the grid.
  ScalarField impulse(spec);
  impulse.at(8, 6) = 1.0;
  KernelSpec tight;
  tight.sigma = 0.8;
  const ScalarField blurred = gaussian_smooth(impulse, tight);
  double sum = 0.0;
  for (std::int64_t i = 0; i < spec.size(); ++i) {
    sum += blurred[i];
    CHECK(blurred[i] >= 0.0);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // Symmetry about the impulse.
  CHECK(blurred.at(8, 5) == doctest::Approx(blurred.at(8, 7)).epsilon(1e-13));
  CHECK(blurred.at(7, 6) == doctest::Approx(blurred.at(9, 6)).epsilon(1e-13));

  // Smoothing shrinks the variance of noise-like data.
  const ScalarField noise = random_field(spec, 9);
  const ScalarField sm = gaussian_smooth(noise, k);
  CHECK(l2_norm(sm) < l2_norm(noise));
}

TEST_CASE("per axis widths differ from the isotropic kernel") {
  const GridSpec spec(16, 16, 0, 16, 0, 16);
  ScalarField impulse(spec);
  impulse.at(8, 8) = 1.0;
  const ScalarField an = gaussian_smooth_axes(impulse, 0.7, 2.1);
  // Wider in y: the vertical neighbor keeps more mass than the horizontal.
  CHECK(an.at(9, 8) > an.at(8, 9));

  const ScalarField iso = gaussian_smooth(impulse, {1.3, 4.0});
  const ScalarField same = gaussian_smooth_axes(impulse, 1.3, 1.3);
  for (std::int64_t i = 0; i < spec.size(); ++i) CHECK(iso[i] == same[i]);
}

TEST_CASE("kernel validation") {
  KernelSpec bad;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.sigma = 1.0;
  bad.truncation = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_SUITE_END();
