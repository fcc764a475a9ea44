#include "varlp/modular.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "varlp/parallel.hpp"

namespace varlp {

namespace {

// |F|^p with exact dispatch for the snapped endpoint exponents.
double power_term(double a, double p) {
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// Deterministic chunked reduction: per-chunk partial sums and stats are
// combined in chunk order, so results are reproducible for a fixed
// thread count.
template <typename Term>
double chunked_sum(std::int64_t n, KernelStats* stats, Term&& term) {
  const int nc = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
  std::vector<KernelStats> chunk_stats(stats ? static_cast<std::size_t>(nc) : 0);
  parallel_chunks(n, [&](int c, std::int64_t b, std::int64_t e) {
    KernelStats* cs = stats ? &chunk_stats[static_cast<std::size_t>(c)] : nullptr;
    double s = 0.0;
    for (std::int64_t k = b; k < e; ++k) s += term(k, cs);
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  if (stats)
    for (const auto& cs : chunk_stats) stats->merge(cs);
  return total;
}

template <typename Body>
void chunked_apply(std::int64_t n, KernelStats* stats, Body&& body) {
  const int nc = chunk_count(n);
  std::vector<KernelStats> chunk_stats(stats ? static_cast<std::size_t>(nc) : 0);
  parallel_chunks(n, [&](int c, std::int64_t b, std::int64_t e) {
    KernelStats* cs = stats ? &chunk_stats[static_cast<std::size_t>(c)] : nullptr;
    for (std::int64_t k = b; k < e; ++k) body(k, cs);
  });
  if (stats)
    for (const auto& cs : chunk_stats) stats->merge(cs);
}

void check_tau_arg(double tau, const char* where) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument(std::string(where) + ": tau must be finite and > 0");
}

}  // namespace

double modular(const ScalarField& f, const ExponentMap& p) {
  require_same_spec(f.spec(), p.spec(), "modular");
  const double sum = chunked_sum(f.size(), nullptr, [&](std::int64_t k, KernelStats*) {
    return power_term(std::abs(f[k]), p[k]);
  });
  return sum * f.spec().cell_area();
}

double modular(const VectorField& f, const ExponentMap& p) {
  require_same_spec(f.spec(), p.spec(), "modular");
  const ScalarField& fx = f.x();
  const ScalarField& fy = f.y();
  const double sum = chunked_sum(fx.size(), nullptr, [&](std::int64_t k, KernelStats*) {
    return power_term(std::sqrt(fx[k] * fx[k] + fy[k] * fy[k]), p[k]);
  });
  return sum * f.spec().cell_area();
}

double modular_conjugate(const ScalarField& f, const ExponentMap& p) {
  require_same_spec(f.spec(), p.spec(), "modular_conjugate");
  const double sum = chunked_sum(f.size(), nullptr, [&](std::int64_t k, KernelStats*) {
    return conj_integrand(std::abs(f[k]), p[k]);
  });
  return sum * f.spec().cell_area();
}

double modular_conjugate(const VectorField& f, const ExponentMap& p) {
  require_same_spec(f.spec(), p.spec(), "modular_conjugate");
  const ScalarField& fx = f.x();
  const ScalarField& fy = f.y();
  const double sum = chunked_sum(fx.size(), nullptr, [&](std::int64_t k, KernelStats*) {
    return conj_integrand(std::sqrt(fx[k] * fx[k] + fy[k] * fy[k]), p[k]);
  });
  return sum * f.spec().cell_area();
}

double moreau_envelope(const ScalarField& f, const ExponentMap& p, double tau,
                       const NewtonConfig& cfg, KernelStats* stats) {
  require_same_spec(f.spec(), p.spec(), "moreau_envelope");
  check_tau_arg(tau, "moreau_envelope");
  const double sum = chunked_sum(f.size(), stats, [&](std::int64_t k, KernelStats* cs) {
    return moreau_integrand(std::abs(f[k]), p[k], tau, cfg, cs);
  });
  return sum * f.spec().cell_area();
}

double moreau_envelope(const VectorField& f, const ExponentMap& p, double tau,
                       const NewtonConfig& cfg, KernelStats* stats) {
  require_same_spec(f.spec(), p.spec(), "moreau_envelope");
  check_tau_arg(tau, "moreau_envelope");
  const ScalarField& fx = f.x();
  const ScalarField& fy = f.y();
  const double sum = chunked_sum(fx.size(), stats, [&](std::int64_t k, KernelStats* cs) {
    return moreau_integrand(std::sqrt(fx[k] * fx[k] + fy[k] * fy[k]), p[k], tau, cfg, cs);
  });
  return sum * f.spec().cell_area();
}

namespace {

template <double (*Factor)(double, double, double, const NewtonConfig&, KernelStats*)>
ScalarField scalar_prox(const ScalarField& f, const ExponentMap& p, double tau,
                        const NewtonConfig& cfg, KernelStats* stats, const char* where) {
  require_same_spec(f.spec(), p.spec(), where);
  check_tau_arg(tau, where);
  ScalarField out(f.spec());
  chunked_apply(f.size(), stats, [&](std::int64_t k, KernelStats* cs) {
    const double a = std::abs(f[k]);
    if (a == 0.0) {
      out[k] = 0.0;
      return;
    }
    const double m = Factor(a, p[k], tau, cfg, cs);
    out[k] = f[k] < 0.0 ? -m : m;
  });
  return out;
}

template <double (*Factor)(double, double, double, const NewtonConfig&, KernelStats*)>
VectorField vector_prox(const VectorField& f, const ExponentMap& p, double tau,
                        const NewtonConfig& cfg, KernelStats* stats, const char* where) {
  require_same_spec(f.spec(), p.spec(), where);
  check_tau_arg(tau, where);
  VectorField out(f.spec());
  const ScalarField& fx = f.x();
  const ScalarField& fy = f.y();
  chunked_apply(fx.size(), stats, [&](std::int64_t k, KernelStats* cs) {
    const double a = std::sqrt(fx[k] * fx[k] + fy[k] * fy[k]);
    if (a == 0.0) {
      out.x()[k] = 0.0;
      out.y()[k] = 0.0;
      return;
    }
    const double scale = Factor(a, p[k], tau, cfg, cs) / a;
    out.x()[k] = scale * fx[k];
    out.y()[k] = scale * fy[k];
  });
  return out;
}

}  // namespace

ScalarField prox_modular(const ScalarField& f, const ExponentMap& p, double tau,
                         const NewtonConfig& cfg, KernelStats* stats) {
  return scalar_prox<prox_factor>(f, p, tau, cfg, stats, "prox_modular");
}

VectorField prox_modular(const VectorField& f, const ExponentMap& p, double tau,
                         const NewtonConfig& cfg, KernelStats* stats) {
  return vector_prox<prox_factor>(f, p, tau, cfg, stats, "prox_modular");
}

ScalarField prox_modular_conj(const ScalarField& f, const ExponentMap& p, double tau,
                              const NewtonConfig& cfg, KernelStats* stats) {
  return scalar_prox<prox_factor_conj>(f, p, tau, cfg, stats, "prox_modular_conj");
}

VectorField prox_modular_conj(const VectorField& f, const ExponentMap& p, double tau,
                              const NewtonConfig& cfg, KernelStats* stats) {
  return vector_prox<prox_factor_conj>(f, p, tau, cfg, stats, "prox_modular_conj");
}

}  // namespace varlp
