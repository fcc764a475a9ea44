#include "varlp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "varlp/diffops.hpp"
#include "varlp/image_io.hpp"
#include "varlp/modular.hpp"

namespace varlp {

Regularizer parse_regularizer(const std::string& name) {
  if (name == "tv") return Regularizer::tv;
  if (name == "tvp") return Regularizer::tvp;
  if (name == "tikhonov") return Regularizer::tikhonov;
  if (name == "tgv2") return Regularizer::tgv2;
  throw std::invalid_argument("unknown regularizer '" + name + "' (tv|tvp|tikhonov|tgv2)");
}

std::string to_string(Regularizer r) {
  switch (r) {
    case Regularizer::tv: return "tv";
    case Regularizer::tvp: return "tvp";
    case Regularizer::tikhonov: return "tikhonov";
    case Regularizer::tgv2: return "tgv2";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("SolverConfig: lambda must be finite and >= 0");
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw std::invalid_argument("SolverConfig: lambda1 and lambda2 must be > 0");
  if (iterations < 1) throw std::invalid_argument("SolverConfig: iterations must be >= 1");
  if (!(theta >= 0.0) || !(theta <= 1.0))
    throw std::invalid_argument("SolverConfig: theta must lie in [0,1]");
  if (!(step_scale > 0.0) || !(step_scale < 1.0))
    throw std::invalid_argument("SolverConfig: step_scale must lie in (0,1)");
  if (opnorm_iters < 1) throw std::invalid_argument("SolverConfig: opnorm_iters must be >= 1");
  if (log_every < 1) throw std::invalid_argument("SolverConfig: log_every must be >= 1");
  newton.validate();
}

void ProblemSpec::validate() const {
  config.validate();
  if (image_data.has_value() == sino_data.has_value())
    throw std::invalid_argument("ProblemSpec: exactly one of image_data and sino_data must be set");
  if (image_data) require_same_spec(image_data->spec(), image_spec, "ProblemSpec");
  if (regularizer == Regularizer::tvp) {
    if (!exponent) throw std::invalid_argument("ProblemSpec: tvp needs an exponent map");
    require_same_spec(exponent->spec(), image_spec, "ProblemSpec (exponent)");
  }
  if (initial) require_same_spec(initial->spec(), image_spec, "ProblemSpec (initial)");
  if (sino_data) {
    sino_data->geometry().validate(image_spec);
    init_fbp.validate();
  }
}

void ConvergenceLog::write_csv(const std::string& path) const {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("ConvergenceLog: cannot open " + path);
  std::fprintf(fp, "# initialization=%s,operator_norm=%.17g,sigma=%.17g,tau=%.17g\n",
               initialization.c_str(), operator_norm, sigma, tau);
  std::fprintf(fp, "iteration,objective,primal_step,dual_step\n");
  for (const Entry& e : entries)
    std::fprintf(fp, "%d,%.17g,%.17g,%.17g\n", e.iteration, e.objective, e.primal_step, e.dual_step);
  std::fclose(fp);
}

double operator_norm(const std::function<ScalarField(const ScalarField&)>& normal_op,
                     const GridSpec& spec, int iters, std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("operator_norm: iters must be >= 1");
  std::mt19937_64 rng(seed);
  ScalarField x(spec);
  for (std::int64_t k = 0; k < x.size(); ++k)
    x[k] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  double nx = l2_norm(x);
  if (nx == 0.0) {
    x[0] = 1.0;
    nx = l2_norm(x);
  }
  x *= 1.0 / nx;

  double mu = 0.0;
  for (int it = 0; it < iters; ++it) {
    ScalarField y = normal_op(x);
    mu = l2_inner(x, y);
    const double ny = l2_norm(y);
    if (ny == 0.0) return 0.0;
    y *= 1.0 / ny;
    x = std::move(y);
  }
  return std::sqrt(std::max(mu, 0.0));
}

namespace {

// Forward model plus data, with the data space flattened to a weighted
// vector so the identity and fan-beam cases share one solver loop.
struct DataTerm {
  GridSpec spec;
  std::optional<FanBeamGeometry> geom;  // empty: identity model
  std::vector<double> g;
  double weight = 0.0;  // quadrature weight of one sample

  static DataTerm make(const ProblemSpec& prob) {
    DataTerm d;
    d.spec = prob.image_spec;
    if (prob.image_data) {
      const auto vals = prob.image_data->values();
      d.g.assign(vals.begin(), vals.end());
      d.weight = d.spec.cell_area();
    } else {
      d.geom = prob.sino_data->geometry();
      const auto vals = prob.sino_data->values();
      d.g.assign(vals.begin(), vals.end());
      d.weight = d.geom->sample_weight();
    }
    return d;
  }

  std::vector<double> apply(const ScalarField& f) const {
    if (!geom) return {f.values().begin(), f.values().end()};
    const Sinogram s = forward(f, *geom);
    return {s.values().begin(), s.values().end()};
  }

  ScalarField apply_adjoint(const std::vector<double>& y) const {
    if (!geom) return ScalarField(spec, y);
    return adjoint(Sinogram(*geom, y), spec);
  }

  double misfit(const std::vector<double>& Tf) const {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double d = Tf[k] - g[k];
      s += d * d;
    }
    return s * weight;
  }
};

ScalarField initial_point(const ProblemSpec& prob, const DataTerm& d, std::string& name) {
  if (prob.initial) {
    name = "custom";
    return *prob.initial;
  }
  if (d.geom) {
    name = "fbp";
    return fbp(*prob.sino_data, prob.init_fbp, prob.image_spec);
  }
  name = "zero";
  return ScalarField(prob.image_spec);
}

void project_ball(VectorField& y, double radius) {
  ScalarField& yx = y.x();
  ScalarField& yy = y.y();
  for (std::int64_t k = 0; k < yx.size(); ++k) {
    const double n = std::sqrt(yx[k] * yx[k] + yy[k] * yy[k]);
    if (n > radius) {
      const double s = radius / n;
      yx[k] *= s;
      yy[k] *= s;
    }
  }
}

void project_ball(TensorField& y, double radius) {
  for (std::int64_t k = 0; k < y.spec().size(); ++k) {
    double n2 = 0.0;
    for (int r = 0; r < 2; ++r) {
      const double a = y.row(r).x()[k], b = y.row(r).y()[k];
      n2 += a * a + b * b;
    }
    const double n = std::sqrt(n2);
    if (n > radius) {
      const double s = radius / n;
      for (int r = 0; r < 2; ++r) {
        y.row(r).x()[k] *= s;
        y.row(r).y()[k] *= s;
      }
    }
  }
}

// p = 1 modular of a tensor field (pointwise Frobenius norm quadrature).
double tensor_l1(const TensorField& t) {
  const ScalarField n = t.norm_field();
  double s = 0.0;
  for (std::int64_t k = 0; k < n.size(); ++k) s += n[k];
  return s * t.spec().cell_area();
}

double vector_l1(const VectorField& v) {
  const ScalarField n = v.norm_field();
  double s = 0.0;
  for (std::int64_t k = 0; k < n.size(); ++k) s += n[k];
  return s * v.spec().cell_area();
}

void check_iterate(const ScalarField& f, double objective, int iteration) {
  if (!std::isfinite(objective) || !f.all_finite()) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "solve: non-finite iterate at iteration %d", iteration);
    throw NumericError(msg);
  }
}

// Iterates this large overflow the next step's prox arguments (pointwise
// norms square the entries), so stop with a diagnosis instead of feeding
// inf downstream. The negated comparison also trips on NaN.
void check_magnitude(const ScalarField& f, int iteration) {
  const double m = std::max(std::abs(f.minimum()), std::abs(f.maximum()));
  if (!(m < 1e140)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "solve: iterate magnitude exploded at iteration %d", iteration);
    throw NumericError(msg);
  }
}

}  // namespace

SolveResult solve(const ProblemSpec& prob) {
  prob.validate();
  if (prob.regularizer == Regularizer::tgv2) {
    Tgv2Result r = solve_tgv2(prob);
    return {std::move(r.image), std::move(r.log)};
  }

  const GridSpec& spec = prob.image_spec;
  const SolverConfig& cfg = prob.config;
  const ExponentMap pmap = prob.regularizer == Regularizer::tvp ? *prob.exponent
                           : prob.regularizer == Regularizer::tv
                               ? ExponentMap::constant(spec, 1.0)
                               : ExponentMap::constant(spec, 2.0);
  const DataTerm data = DataTerm::make(prob);
  const double lambda = cfg.lambda;

  const auto normal_op = [&](const ScalarField& x) {
    ScalarField y = data.apply_adjoint(data.apply(x));
    y -= divergence(gradient(x));
    return y;
  };
  const double L = operator_norm(normal_op, spec, cfg.opnorm_iters, cfg.opnorm_seed);
  if (!(L > 0.0) || !std::isfinite(L)) throw NumericError("solve: degenerate operator norm estimate");
  const double step = cfg.step_scale / L;  // sigma = tau

  ConvergenceLog log;
  log.operator_norm = L;
  log.sigma = log.tau = step;
  ScalarField f = initial_point(prob, data, log.initialization);
  check_magnitude(f, 0);
  ScalarField fbar = f;
  std::vector<double> q(data.g.size(), 0.0);
  VectorField phi(spec);

  const auto objective = [&](const ScalarField& u) {
    double obj = data.misfit(data.apply(u));
    if (lambda > 0.0) obj += lambda * modular(gradient(u), pmap);
    return obj;
  };
  log.entries.push_back({0, objective(f), 0.0, 0.0});

  for (int n = 1; n <= cfg.iterations; ++n) {
    // dual ascent: data fidelity
    const std::vector<double> Tf = data.apply(fbar);
    double dual_sq = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double qn = (q[k] + step * (Tf[k] - data.g[k])) / (1.0 + 0.5 * step);
      const double d = qn - q[k];
      dual_sq += d * d;
      q[k] = qn;
    }
    dual_sq *= data.weight;

    // dual ascent: regularizer (skipped entirely when lambda is 0)
    VectorField arg = gradient(fbar);
    arg *= step;
    arg += phi;
    if (lambda > 0.0) {
      arg *= 1.0 / lambda;
      VectorField phi_new = prox_modular_conj(arg, pmap, step / lambda, cfg.newton);
      phi_new *= lambda;
      VectorField diff = phi_new - phi;
      dual_sq += l2_inner(diff, diff);
      phi = std::move(phi_new);
    }

    // primal descent
    ScalarField gstep = data.apply_adjoint(q);
    gstep -= divergence(phi);
    gstep *= step;
    ScalarField fnew = f;
    fnew -= gstep;
    const double primal_sq = l2_inner(gstep, gstep);

    // over-relaxation
    fbar = fnew;
    ScalarField delta = fnew - f;
    delta *= cfg.theta;
    fbar += delta;
    f = std::move(fnew);
    check_magnitude(fbar, n);

    if (n % cfg.log_every == 0 || n == cfg.iterations) {
      const double obj = objective(f);
      check_iterate(f, obj, n);
      log.entries.push_back({n, obj, std::sqrt(primal_sq), std::sqrt(dual_sq)});
    }
  }
  return {std::move(f), std::move(log)};
}

Tgv2Result solve_tgv2(const ProblemSpec& prob) {
  prob.validate();
  if (prob.regularizer != Regularizer::tgv2)
    throw std::invalid_argument("solve_tgv2: problem regularizer must be tgv2");

  const GridSpec& spec = prob.image_spec;
  const SolverConfig& cfg = prob.config;
  const DataTerm data = DataTerm::make(prob);
  const double l1 = cfg.lambda1, l2 = cfg.lambda2;

  // power iteration on the (f, v) product space
  std::mt19937_64 rng(cfg.opnorm_seed);
  ScalarField xf(spec);
  VectorField xv(spec);
  const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  for (std::int64_t k = 0; k < xf.size(); ++k) xf[k] = u01();
  for (std::int64_t k = 0; k < xf.size(); ++k) {
    xv.x()[k] = u01();
    xv.y()[k] = u01();
  }
  double mu = 0.0;
  {
    const double n0 = std::sqrt(l2_inner(xf, xf) + l2_inner(xv, xv));
    xf *= 1.0 / n0;
    xv *= 1.0 / n0;
  }
  for (int it = 0; it < cfg.opnorm_iters; ++it) {
    // K(f,v) = (Tf, grad f - v, grad v) and
    // K*(q, y1, y2) = (T*q - div y1, -y1 - tensor_div y2), so
    // K*K: nf = T*Tf - div(grad f - v), nv = -(grad f - v) - tensor_div(grad v)
    ScalarField nf = data.apply_adjoint(data.apply(xf));
    VectorField b = gradient(xf);
    b -= xv;
    nf -= divergence(b);
    VectorField nv(spec);
    nv -= b;
    nv -= tensor_divergence(vector_gradient(xv));

    mu = l2_inner(xf, nf) + l2_inner(xv, nv);
    const double nn = std::sqrt(l2_inner(nf, nf) + l2_inner(nv, nv));
    if (nn == 0.0) {
      mu = 0.0;
      break;
    }
    nf *= 1.0 / nn;
    nv *= 1.0 / nn;
    xf = std::move(nf);
    xv = std::move(nv);
  }
  const double L = std::sqrt(std::max(mu, 0.0));
  if (!(L > 0.0) || !std::isfinite(L)) throw NumericError("solve_tgv2: degenerate operator norm estimate");
  const double step = cfg.step_scale / L;

  ConvergenceLog log;
  log.operator_norm = L;
  log.sigma = log.tau = step;

  ScalarField f = initial_point(prob, data, log.initialization);
  check_magnitude(f, 0);
  VectorField v(spec);
  ScalarField fbar = f;
  VectorField vbar = v;
  std::vector<double> q(data.g.size(), 0.0);
  VectorField y1(spec);
  TensorField y2(spec);

  const auto objective = [&](const ScalarField& u, const VectorField& w) {
    VectorField e1 = gradient(u);
    e1 -= w;
    return data.misfit(data.apply(u)) + l1 * vector_l1(e1) + l2 * tensor_l1(vector_gradient(w));
  };
  log.entries.push_back({0, objective(f, v), 0.0, 0.0});

  for (int n = 1; n <= cfg.iterations; ++n) {
    const std::vector<double> Tf = data.apply(fbar);
    double dual_sq = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double qn = (q[k] + step * (Tf[k] - data.g[k])) / (1.0 + 0.5 * step);
      const double d = qn - q[k];
      dual_sq += d * d;
      q[k] = qn;
    }
    dual_sq *= data.weight;

    VectorField y1_new = gradient(fbar);
    y1_new -= vbar;
    y1_new *= step;
    y1_new += y1;
    project_ball(y1_new, l1);
    {
      VectorField d = y1_new - y1;
      dual_sq += l2_inner(d, d);
    }
    y1 = std::move(y1_new);

    TensorField y2_new = vector_gradient(vbar);
    y2_new *= step;
    y2_new += y2;
    project_ball(y2_new, l2);
    {
      TensorField d = y2_new;
      d -= y2;
      dual_sq += l2_inner(d, d);
    }
    y2 = std::move(y2_new);

    ScalarField fstep = data.apply_adjoint(q);
    fstep -= divergence(y1);
    fstep *= step;
    ScalarField fnew = f;
    fnew -= fstep;

    VectorField vstep = tensor_divergence(y2);
    vstep += y1;
    vstep *= step;  // v update direction: -tau * (-y1 - tensor_div y2)
    VectorField vnew = v;
    vnew += vstep;

    const double primal_sq = l2_inner(fstep, fstep) + l2_inner(vstep, vstep);

    fbar = fnew;
    {
      ScalarField d = fnew - f;
      d *= cfg.theta;
      fbar += d;
    }
    vbar = vnew;
    {
      VectorField d = vnew - v;
      d *= cfg.theta;
      vbar += d;
    }
    f = std::move(fnew);
    v = std::move(vnew);
    check_magnitude(fbar, n);
    check_magnitude(vbar.x(), n);
    check_magnitude(vbar.y(), n);

    if (n % cfg.log_every == 0 || n == cfg.iterations) {
      const double obj = objective(f, v);
      check_iterate(f, obj, n);
      log.entries.push_back({n, obj, std::sqrt(primal_sq), std::sqrt(dual_sq)});
    }
  }
  return {std::move(f), std::move(v), std::move(log)};
}

}  // namespace varlp
