#include "varlp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaFloor = 1e-300;  // iterates below this are handed to bisection

void check_common(double z, double p, bool interior_only) {
  if (!(z >= 0.0) || !std::isfinite(z))
    throw std::invalid_argument("kernel: z_norm must be finite and >= 0");
  if (interior_only) {
    if (!(p > 1.0 && p < 2.0))
      throw std::invalid_argument("kernel: p must lie strictly inside (1,2)");
  } else if (!(p >= 1.0 && p <= 2.0)) {
    throw std::invalid_argument("kernel: p must lie in [1,2]");
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("kernel: tau must be finite and > 0");
}

double residual(double alpha, double z, double p, double tau) {
  return alpha + tau * p * std::pow(alpha, p - 1.0) - z;
}

// Blend of the closed-form p=1 and p=2 solutions, capped so that
// alpha_0^(p-1) stays strictly below z/(tau*p*(2-p)); that bound is what
// keeps the Newton numerator positive and the iterates monotone.
double start_value(double z, double p, double tau) {
  const double a1 = std::max(z - tau, 0.0);
  const double a2 = z / (1.0 + 2.0 * tau);
  const double blend = (2.0 - p) * a1 + (p - 1.0) * a2;
  const double cap = 0.5 * std::pow(z / (tau * p * (2.0 - p)), 1.0 / (p - 1.0));
  return std::min({blend, z, cap});
}

double bisect(double z, double p, double tau, double tol) {
  // residual(0) = -z < 0 and residual(z) > 0 bracket the root
  double lo = 0.0, hi = z;
  double best = 0.0, best_abs = z;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double s = residual(mid, z, p, tau);
    if (std::abs(s) < best_abs) {
      best_abs = std::abs(s);
      best = mid;
    }
    if (best_abs <= tol) break;
    if (s < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

}  // namespace

void NewtonConfig::validate() const {
  if (!(tol >= 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("NewtonConfig: tol must be finite and >= 0");
  if (max_iter < 1) throw std::invalid_argument("NewtonConfig: max_iter must be >= 1");
}

double conj_integrand(double z_norm, double p) {
  check_common(z_norm, p, false);
  if (p == 1.0) return z_norm <= 1.0 ? 0.0 : kInf;
  if (p == 2.0) return 0.25 * z_norm * z_norm;
  const double q = p / (p - 1.0);
  return std::pow(z_norm, q) * (std::pow(p, -1.0 / (p - 1.0)) - std::pow(p, -q));
}

double newton_alpha(double z_norm, double p, double tau, const NewtonConfig& cfg,
                    KernelStats* stats, NewtonTrace* trace) {
  cfg.validate();
  check_common(z_norm, p, true);
  check_tau(tau);
  if (z_norm == 0.0) {
    if (trace) trace->iterates.push_back(0.0);
    return 0.0;
  }
  if (stats) ++stats->newton_calls;

  double alpha = start_value(z_norm, p, tau);
  if (trace) trace->iterates.push_back(alpha);
  bool degenerate = false;
  for (int k = 0; k < cfg.max_iter; ++k) {
    if (!(alpha >= kAlphaFloor) || !std::isfinite(alpha)) {
      degenerate = true;
      break;
    }
    const double apm1 = std::pow(alpha, p - 1.0);
    const double resid = alpha + tau * p * apm1 - z_norm;
    if (std::abs(resid) <= cfg.tol) return alpha;
    alpha = (z_norm - p * (2.0 - p) * tau * apm1) / (1.0 + tau * p * (p - 1.0) * (apm1 / alpha));
    if (stats) ++stats->newton_iters;
    if (trace) trace->iterates.push_back(alpha);
  }
  if (!degenerate && alpha >= kAlphaFloor && std::isfinite(alpha) &&
      std::abs(residual(alpha, z_norm, p, tau)) <= cfg.tol)
    return alpha;

  if (stats) ++stats->bisection_fallbacks;
  return bisect(z_norm, p, tau, cfg.tol);
}

double newton_alpha_fixed_iters(double z_norm, double p, double tau, int iters) {
  if (z_norm <= 0.0) return 0.0;
  double alpha = start_value(z_norm, p, tau);
  for (int k = 0; k < iters; ++k) {
    const double apm1 = std::pow(alpha, p - 1.0);
    alpha = (z_norm - p * (2.0 - p) * tau * apm1) / (1.0 + tau * p * (p - 1.0) * (apm1 / alpha));
  }
  return alpha;
}

double moreau_integrand(double z_norm, double p, double tau, const NewtonConfig& cfg,
                        KernelStats* stats) {
  check_common(z_norm, p, false);
  check_tau(tau);
  if (p == 1.0) return z_norm <= tau ? 0.5 * z_norm * z_norm / tau : z_norm - 0.5 * tau;
  if (p == 2.0) return z_norm * z_norm / (1.0 + 2.0 * tau);
  const double a = newton_alpha(z_norm, p, tau, cfg, stats);
  const double d = z_norm - a;
  return d * (2.0 * a + p * d) / (2.0 * tau * p);
}

double prox_factor(double z_norm, double p, double tau, const NewtonConfig& cfg,
                   KernelStats* stats) {
  check_common(z_norm, p, false);
  check_tau(tau);
  if (p == 1.0) return std::max(z_norm - tau, 0.0);
  if (p == 2.0) return z_norm / (1.0 + 2.0 * tau);
  return newton_alpha(z_norm, p, tau, cfg, stats);
}

double prox_factor_conj(double z_norm, double p, double tau, const NewtonConfig& cfg,
                        KernelStats* stats) {
  check_common(z_norm, p, false);
  check_tau(tau);
  if (p == 1.0) return std::min(z_norm, 1.0);
  if (p == 2.0) return 2.0 * z_norm / (tau + 2.0);
  return z_norm - newton_alpha(z_norm, p, std::pow(tau, 1.0 - p), cfg, stats);
}

}  // namespace varlp
