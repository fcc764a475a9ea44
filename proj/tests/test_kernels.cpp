#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "varlp/kernels.hpp"

using namespace varlp;

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  }
};

// Independent root oracle: plain bisection on the increasing residual
// alpha + tau*p*alpha^(p-1) - z over [0, z].
double bisect_root(double z, double p, double tau) {
  // Enough halvings to pin roots that collapse to ~1e-80 when p -> 1.
  double lo = 0.0, hi = z;
  for (int k = 0; k < 400; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid + tau * p * std::pow(mid, p - 1.0) < z)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Golden-section maximizer of zy - y^p over [0, hi]; independent oracle
// for the conjugate integrand (the objective is concave in y).
double golden_max_conj(double z, double p, double hi) {
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  const auto val = [z, p](double y) { return z * y - std::pow(y, p); };
  for (int k = 0; k < 200; ++k) {
    if (val(c) > val(d))
      b = d;
    else
      a = c;
    c = b - inv_phi * (b - a);
    d = a + inv_phi * (b - a);
  }
  return val(0.5 * (a + b));
}

// Golden-section minimizer of (z-y)^2/(2 tau) + y^p over [0, z];
// independent oracle for the Moreau envelope and the prox point.
struct MinResult {
  double argmin;
  double value;
};
MinResult golden_min_envelope(double z, double p, double tau) {
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = z;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  const auto val = [z, p, tau](double y) {
    return (z - y) * (z - y) / (2.0 * tau) + std::pow(y, p);
  };
  for (int k = 0; k < 200; ++k) {
    if (val(c) < val(d))
      b = d;
    else
      a = c;
    c = b - inv_phi * (b - a);
    d = a + inv_phi * (b - a);
  }
  const double y = 0.5 * (a + b);
  return {y, val(y)};
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("conjugate integrand closed forms") {
  // p = 1: indicator of the unit interval in |z|.
  CHECK(conj_integrand(0.0, 1.0) == 0.0);
  CHECK(conj_integrand(1.0, 1.0) == 0.0);
  CHECK(std::isinf(conj_integrand(1.0 + 1e-12, 1.0)));

  // p = 2: z^2/4.
  CHECK(conj_integrand(3.0, 2.0) == doctest::Approx(2.25));

  // Interior worked value: R(1, 1.5) = 4/27.
  CHECK(conj_integrand(1.0, 1.5) == doctest::Approx(4.0 / 27.0).epsilon(1e-14));
  CHECK(conj_integrand(0.0, 1.5) == 0.0);
}

TEST_CASE("conjugate integrand matches the sup oracle") {
  Rng rng(101);
  for (int t = 0; t < 300; ++t) {
    const double p = rng.uniform(1.2, 1.95);
    const double z = rng.uniform(0.1, 5.0);
    // The maximizer (z/p)^(1/(p-1)) stays below this bracket on the
    // domain above.
    const double oracle = golden_max_conj(z, p, 2e4);
    const double got = conj_integrand(z, p);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("newton root satisfies the optimality equation") {
  Rng rng(7);
  KernelStats stats;
  for (int t = 0; t < 2000; ++t) {
    const double p = rng.uniform(1.0 + 1e-6, 2.0 - 1e-6);
    const double z = rng.uniform(1e-8, 10.0);
    const double tau = rng.uniform(1e-4, 10.0);
    const double a = newton_alpha(z, p, tau, {}, &stats);
    CHECK(a >= 0.0);
    CHECK(a <= z);
    const double resid = a + tau * p * std::pow(a, p - 1.0) - z;
    CHECK(std::abs(resid) <= 1e-10);
  }
  CHECK(stats.newton_calls == 2000);
  CHECK(stats.newton_iters > 0);
}

TEST_CASE("newton agrees with the bisection oracle") {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const double p = rng.uniform(1.05, 1.95);
    const double z = rng.uniform(1e-3, 10.0);
    const double tau = rng.uniform(1e-3, 10.0);
    const double got = newton_alpha(z, p, tau);
    const double want = bisect_root(z, p, tau);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("worked example z=2 p=3/2 tau=1") {
  // With s = sqrt(alpha) the optimality equation is s^2 + 1.5 s = 2,
  // so alpha = 2 - 1.5 * (sqrt(10.25) - 1.5) / 2.
  const double s = 0.5 * (std::sqrt(10.25) - 1.5);
  const double alpha = 2.0 - 1.5 * s;
  CHECK(alpha == doctest::Approx(0.72382841096268177).epsilon(1e-15));

  CHECK(newton_alpha(2.0, 1.5, 1.0) == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(prox_factor(2.0, 1.5, 1.0) == doctest::Approx(alpha).epsilon(1e-12));
  // tau^(1-p) = 1: the conjugate prox complements alpha exactly.
  CHECK(prox_factor_conj(2.0, 1.5, 1.0) == doctest::Approx(2.0 - alpha).epsilon(1e-12));

  const double env = (2.0 - alpha) * (2.0 * alpha + 1.5 * (2.0 - alpha)) / 3.0;
  CHECK(moreau_integrand(2.0, 1.5, 1.0) == doctest::Approx(env).epsilon(1e-12));
}

TEST_CASE("newton iterates increase from below") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const double p = rng.uniform(1.05, 1.95);
    const double z = rng.uniform(1e-3, 10.0);
    const double tau = rng.uniform(1e-3, 10.0);
    NewtonTrace trace;
    const double a = newton_alpha(z, p, tau, {}, nullptr, &trace);
    REQUIRE(!trace.iterates.empty());
    // The capped start may sit above the root; the tangent step then
    // lands below it and every later step increases (concave residual).
    for (std::size_t k = 1; k + 1 < trace.iterates.size(); ++k)
      CHECK(trace.iterates[k + 1] >= trace.iterates[k] * (1.0 - 1e-9) - 1e-300);
    CHECK(trace.iterates.back() == doctest::Approx(a));
  }
}

TEST_CASE("starved iteration budget falls back to bisection") {
  NewtonConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  KernelStats stats;
  const double got = newton_alpha(4.0, 1.3, 2.0, cfg, &stats);
  CHECK(stats.bisection_fallbacks == 1);
  CHECK(got == doctest::Approx(bisect_root(4.0, 1.3, 2.0)).epsilon(1e-8));
}

TEST_CASE("hard corners still satisfy the tolerance") {
  // Flat residual regimes that punish a naive start value.
  const double cases[][3] = {
      {1e-8, 1.05, 1e3}, {1e-6, 1.05, 1e2}, {10.0, 1.999, 1e-4}, {1e-3, 1.5, 1e6},
      {5.0, 1.05, 1e-6}, {9.9, 1.01, 9.9},  {1e-12, 1.9, 1.0},
  };
  for (const auto& c : cases) {
    const double a = newton_alpha(c[0], c[1], c[2]);
    const double resid = a + c[2] * c[1] * std::pow(a, c[1] - 1.0) - c[0];
    CAPTURE(c[0]);
    CAPTURE(c[1]);
    CAPTURE(c[2]);
    CHECK(std::abs(resid) <= 1e-10);
  }
}

TEST_CASE("fixed iteration variant converges in ten steps") {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    const double p = rng.uniform(1.05, 1.95);
    const double z = rng.uniform(1e-2, 10.0);
    const double tau = rng.uniform(1e-2, 10.0);
    const double a = newton_alpha_fixed_iters(z, p, tau, 10);
    const double resid = a + tau * p * std::pow(a, p - 1.0) - z;
    CHECK(std::abs(resid) <= 1e-9);
  }
}

TEST_CASE("moreau envelope closed forms") {
  // p = 1 is the Huber function.
  CHECK(moreau_integrand(0.5, 1.0, 1.0) == doctest::Approx(0.125));
  CHECK(moreau_integrand(2.0, 1.0, 1.0) == doctest::Approx(1.5));
  CHECK(moreau_integrand(1.0, 1.0, 1.0) == doctest::Approx(0.5));
  // p = 2: z^2/(1+2tau).
  CHECK(moreau_integrand(3.0, 2.0, 0.5) == doctest::Approx(4.5));
  CHECK(moreau_integrand(0.0, 1.7, 2.0) == 0.0);
}

TEST_CASE("moreau envelope and prox match the minimization oracle") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const double p = rng.uniform(1.0, 2.0);  // closed p range, mixed branches
    const double z = rng.uniform(0.05, 5.0);
    const double tau = rng.uniform(0.05, 5.0);
    const MinResult oracle = golden_min_envelope(z, p, tau);
    CHECK(moreau_integrand(z, p, tau) == doctest::Approx(oracle.value).epsilon(1e-8));
    // The argmin localizes less sharply than the value near flat minima.
    CHECK(prox_factor(z, p, tau) == doctest::Approx(oracle.argmin).epsilon(1e-5));
  }
}

TEST_CASE("prox factor closed forms") {
  CHECK(prox_factor(2.0, 1.0, 0.5) == doctest::Approx(1.5));
  CHECK(prox_factor(0.2, 1.0, 0.5) == 0.0);
  CHECK(prox_factor(3.0, 2.0, 0.5) == doctest::Approx(1.5));
  CHECK(prox_factor_conj(0.7, 1.0, 3.0) == doctest::Approx(0.7));
  CHECK(prox_factor_conj(1.7, 1.0, 3.0) == doctest::Approx(1.0));
  CHECK(prox_factor_conj(3.0, 2.0, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("scalar moreau decomposition") {
  // prox of tau*R* and prox of R/tau split z exactly:
  //   prox_{tau R*}(z) + tau * prox_{R/tau}(z/tau) = z
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const double p = rng.uniform(1.0, 2.0);
    const double z = rng.uniform(0.0, 8.0);
    const double tau = rng.uniform(0.05, 8.0);
    const double conj = prox_factor_conj(z, p, tau);
    const double direct = tau * prox_factor(z / tau, p, 1.0 / tau);
    CHECK(conj + direct == doctest::Approx(z).epsilon(1e-8));
  }
}

TEST_CASE("fenchel-young holds with equality at the gradient") {
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    const double p = rng.uniform(1.05, 1.95);
    const double t0 = rng.uniform(1e-3, 3.0);
    const double s0 = p * std::pow(t0, p - 1.0);
    const double lhs = conj_integrand(s0, p) + std::pow(t0, p);
    CHECK(lhs == doctest::Approx(s0 * t0).epsilon(1e-9));

    // Arbitrary pairs respect the inequality.
    const double s = rng.uniform(0.0, 5.0);
    const double u = rng.uniform(0.0, 5.0);
    CHECK(conj_integrand(s, p) + std::pow(u, p) >= s * u - 1e-12);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(conj_integrand(-1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(conj_integrand(1.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(conj_integrand(1.0, 2.1), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(conj_integrand(nan, 1.5), std::invalid_argument);

  CHECK_THROWS_AS(newton_alpha(1.0, 1.0, 1.0), std::invalid_argument);  // p must be interior
  CHECK_THROWS_AS(newton_alpha(1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(newton_alpha(1.0, 1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(newton_alpha(1.0, 1.5, -2.0), std::invalid_argument);

  CHECK_THROWS_AS(moreau_integrand(1.0, 1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_factor(1.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_factor_conj(-1.0, 1.5, 1.0), std::invalid_argument);

  NewtonConfig bad;
  bad.max_iter = 0;
  CHECK_THROWS_AS(newton_alpha(1.0, 1.5, 1.0, bad), std::invalid_argument);
  bad.max_iter = 10;
  bad.tol = -1.0;
  CHECK_THROWS_AS(newton_alpha(1.0, 1.5, 1.0, bad), std::invalid_argument);
}

TEST_CASE("zero input maps to zero") {
  CHECK(newton_alpha(0.0, 1.5, 2.0) == 0.0);
  CHECK(prox_factor(0.0, 1.3, 0.7) == 0.0);
  CHECK(prox_factor_conj(0.0, 1.3, 0.7) == 0.0);
  CHECK(moreau_integrand(0.0, 1.3, 0.7) == 0.0);
}

TEST_SUITE_END();
