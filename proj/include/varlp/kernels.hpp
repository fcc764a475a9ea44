#pragma once

#include <cstdint>
#include <vector>

namespace varlp {

/// Tolerance and iteration cap for the guarded Newton root finder.
struct NewtonConfig {
  double tol = 1e-10;  // residual tolerance on |alpha + tau*p*alpha^(p-1) - z|
  int max_iter = 20;
  void validate() const;
};

/// Aggregated kernel diagnostics. Callers own thread safety (the field
/// routines accumulate per chunk and merge in fixed order).
struct KernelStats {
  std::int64_t newton_calls = 0;
  std::int64_t newton_iters = 0;
  std::int64_t bisection_fallbacks = 0;
  void merge(const KernelStats& o) {
    newton_calls += o.newton_calls;
    newton_iters += o.newton_iters;
    bisection_fallbacks += o.bisection_fallbacks;
  }
};

/// Records the Newton iterate sequence (diagnostic hook for tests).
struct NewtonTrace {
  std::vector<double> iterates;  // alpha_0, alpha_1, ...
};

/// Integrand of the convex conjugate of z -> |z|^p, as a function of
/// z_norm = |z| and the exponent p in [1,2]:
///   p = 1: 0 if z_norm <= 1, +infinity otherwise (indicator of the unit ball)
///   p = 2: z_norm^2 / 4
///   else : z_norm^(p/(p-1)) * (p^(-1/(p-1)) - p^(-p/(p-1)))
/// Returns +infinity as an explicit extended-real sentinel.
double conj_integrand(double z_norm, double p);

/// Solves alpha + tau*p*alpha^(p-1) = z_norm for the unique root in
/// [0, z_norm), for p strictly inside (1,2) and tau > 0.
///
/// Uses the damped-start Newton iteration
///   alpha <- (z_norm - p*(2-p)*tau*alpha^(p-1)) / (1 + tau*p*(p-1)*alpha^(p-2))
/// whose start value keeps the iterates positive, increasing from the
/// second iterate on, and quadratically convergent. If the residual is
/// still above tol after max_iter steps, or an iterate degenerates
/// (below 1e-300), the routine falls back to bisection on [0, z_norm]
/// (at most 200 steps) and counts the event in stats.
double newton_alpha(double z_norm, double p, double tau, const NewtonConfig& cfg = {},
                    KernelStats* stats = nullptr, NewtonTrace* trace = nullptr);

/// Exactly `iters` Newton steps from the standard start value, no
/// residual checks. Benchmark protocol only.
double newton_alpha_fixed_iters(double z_norm, double p, double tau, int iters);

/// Moreau envelope integrand of z -> |z|^p with parameter tau:
///   p = 1: Huber (z_norm^2/(2 tau) below tau, z_norm - tau/2 above)
///   p = 2: z_norm^2 / (1 + 2 tau)
///   else : (z_norm - a)(2a + p(z_norm - a)) / (2 tau p), a = newton_alpha(...)
double moreau_integrand(double z_norm, double p, double tau, const NewtonConfig& cfg = {},
                        KernelStats* stats = nullptr);

/// Magnitude factor of the proximal map of tau * |.|^p:
///   p = 1: max(z_norm - tau, 0)    p = 2: z_norm / (1 + 2 tau)
///   else : newton_alpha(z_norm, p, tau)
double prox_factor(double z_norm, double p, double tau, const NewtonConfig& cfg = {},
                   KernelStats* stats = nullptr);

/// Magnitude factor of the proximal map of the conjugate integrand:
///   p = 1: min(z_norm, 1)          p = 2: 2 z_norm / (tau + 2)
///   else : z_norm - newton_alpha(z_norm, p, tau^(1-p))
double prox_factor_conj(double z_norm, double p, double tau, const NewtonConfig& cfg = {},
                        KernelStats* stats = nullptr);

}  // namespace varlp
