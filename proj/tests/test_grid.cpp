#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "varlp/grid.hpp"
#include "varlp/metrics.hpp"
#include "varlp/noise.hpp"
#include "varlp/phantom.hpp"

using namespace varlp;

TEST_SUITE_BEGIN("grid");

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(GridSpec(0, 4, 0, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, -1, 0, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 4, 1, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 4, 0, 1, 2, 1), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(GridSpec(4, 4, nan, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("cell geometry") {
  const GridSpec s = GridSpec::unit_cells(2, 3);
  CHECK(s.rows == 2);
  CHECK(s.cols == 3);
  CHECK(s.cell_width() == doctest::Approx(1.0));
  CHECK(s.cell_height() == doctest::Approx(1.0));
  CHECK(s.cell_area() == doctest::Approx(1.0));
  CHECK(s.cell_center(0, 0).x == doctest::Approx(0.5));
  CHECK(s.cell_center(0, 0).y == doctest::Approx(0.5));
  CHECK(s.cell_center(1, 2).x == doctest::Approx(2.5));
  CHECK(s.cell_center(1, 2).y == doctest::Approx(1.5));

  const GridSpec q = GridSpec::square(4, 10.0);
  CHECK(q.x0 == -10.0);
  CHECK(q.y1 == 10.0);
  CHECK(q.cell_width() == doctest::Approx(5.0));
  CHECK(q.circumradius() == doctest::Approx(std::sqrt(200.0)));
}

TEST_CASE("scalar field construction and bounds") {
  const GridSpec s = GridSpec::unit_cells(2, 2);
  ScalarField f(s, 3.0);
  CHECK(f.minimum() == 3.0);
  CHECK(f.maximum() == 3.0);

  CHECK_THROWS_AS(ScalarField(s, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      ScalarField(s, std::vector<double>{1.0, 2.0, std::numeric_limits<double>::infinity(), 4.0}),
      std::invalid_argument);

  ScalarField g(s, {1.0, -2.0, 0.5, 7.0});
  CHECK(g.minimum() == -2.0);
  CHECK(g.maximum() == 7.0);
  CHECK(g.at(1, 1) == 7.0);
  CHECK(g[2] == 0.5);
}

TEST_CASE("field arithmetic and inner product weighting") {
  // 2x2 cells on [0,2]^2: every cell has unit area, so the L2 norm of
  // the constant 1 field is sqrt(4).
  const GridSpec s(2, 2, 0, 2, 0, 2);
  const ScalarField ones(s, 1.0);
  CHECK(l2_norm(ones) == doctest::Approx(2.0));

  // Halving the extent scales the norm by the cell area.
  const GridSpec h(2, 2, 0, 1, 0, 1);
  CHECK(l2_norm(ScalarField(h, 1.0)) == doctest::Approx(1.0));

  ScalarField a(s, 2.0);
  a += ones;
  CHECK(a.maximum() == 3.0);
  a -= ones;
  a *= 0.5;
  CHECK(a.minimum() == 1.0);
  const ScalarField b = 2.0 * (a + ones) - ones;
  CHECK(b.maximum() == doctest::Approx(3.0));
  CHECK(l2_inner(ones, b) == doctest::Approx(12.0));
}

TEST_CASE("vector field norms") {
  const GridSpec s = GridSpec::unit_cells(1, 2);
  VectorField v(ScalarField(s, 3.0), ScalarField(s, 4.0));
  const ScalarField n = v.norm_field();
  CHECK(n[0] == doctest::Approx(5.0));
  CHECK(l2_inner(v, v) == doctest::Approx(50.0));
  CHECK_THROWS_AS(VectorField(ScalarField(s), ScalarField(GridSpec::unit_cells(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("mismatched specs are rejected") {
  const ScalarField a(GridSpec::unit_cells(2, 2));
  const ScalarField b(GridSpec::unit_cells(2, 3));
  CHECK_THROWS_AS(l2_inner(a, b), std::invalid_argument);
}

TEST_CASE("noise is seeded and respects level") {
  const GridSpec s = GridSpec::unit_cells(64, 64);
  ScalarField f(s);
  for (std::int64_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k % 7);

  const NoiseResult a = add_noise(f, {0.1, 42});
  const NoiseResult b = add_noise(f, {0.1, 42});
  const NoiseResult c = add_noise(f, {0.1, 43});
  CHECK(!a.degenerate_range);
  bool identical = true, differs = false;
  for (std::int64_t k = 0; k < f.size(); ++k) {
    identical = identical && a.field[k] == b.field[k];
    differs = differs || a.field[k] != c.field[k];
  }
  CHECK(identical);
  CHECK(differs);

  // Empirical standard deviation close to level * range (range = 6).
  double mean = 0.0;
  for (std::int64_t k = 0; k < f.size(); ++k) mean += a.field[k] - f[k];
  mean /= static_cast<double>(f.size());
  double var = 0.0;
  for (std::int64_t k = 0; k < f.size(); ++k) {
    const double d = a.field[k] - f[k] - mean;
    var += d * d;
  }
  var /= static_cast<double>(f.size());
  CHECK(std::sqrt(var) == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("noise edge cases") {
  const GridSpec s = GridSpec::unit_cells(4, 4);
  ScalarField f(s, 2.5);
  const NoiseResult r = add_noise(f, {0.1, 1});
  CHECK(r.degenerate_range);
  for (std::int64_t k = 0; k < f.size(); ++k) CHECK(r.field[k] == 2.5);

  ScalarField g(s);
  g[0] = 1.0;
  const NoiseResult zero = add_noise(g, {0.0, 1});
  CHECK(!zero.degenerate_range);
  for (std::int64_t k = 0; k < g.size(); ++k) CHECK(zero.field[k] == g[k]);

  CHECK_THROWS_AS(add_noise(g, {-0.1, 1}), std::invalid_argument);
}

TEST_CASE("psnr and mse") {
  const GridSpec s = GridSpec::unit_cells(8, 8);
  ScalarField ref(s);
  for (std::int64_t k = 0; k < ref.size(); ++k) ref[k] = static_cast<double>(k % 3);

  ScalarField f = ref;
  CHECK(std::isinf(psnr(f, ref)));

  for (std::int64_t k = 0; k < f.size(); ++k) f[k] += 0.2;
  CHECK(mse(f, ref) == doctest::Approx(0.04));
  // range 2, MSE 0.04: 10*log10(4/0.04) = 20.
  CHECK(psnr(f, ref) == doctest::Approx(20.0));

  const ScalarField flat(s, 1.0);
  CHECK_THROWS_AS(psnr(f, flat), std::invalid_argument);
}

TEST_CASE("square phantom sampling") {
  CHECK_THROWS_AS(square_phantom(GridSpec::unit_cells(8, 8)), std::invalid_argument);

  const GridSpec s(32, 48, -10, 10, -10, 10);
  const ScalarField f = square_phantom(s);
  for (std::int64_t i = 0; i < s.rows; ++i)
    for (std::int64_t j = 0; j < s.cols; ++j) {
      const Point c = s.cell_center(i, j);
      const double want =
          (std::abs(c.x) <= 5.0 && std::abs(c.y) <= 5.0) ? c.x : 0.0;
      CHECK(f.at(i, j) == want);
    }
}

TEST_SUITE_END();
