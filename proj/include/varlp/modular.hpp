#pragma once

#include "varlp/exponent_map.hpp"
#include "varlp/grid.hpp"
#include "varlp/kernels.hpp"

namespace varlp {

/// Variable-exponent modular: sum over cells of |F(x)|^p(x) * cell_area
/// (midpoint quadrature of the continuous integral). For vector fields
/// |F| is the pointwise Euclidean norm.
double modular(const ScalarField& f, const ExponentMap& p);
double modular(const VectorField& f, const ExponentMap& p);

/// Quadrature of conj_integrand(|F|, p); +infinity as soon as any cell
/// is infinite (p = 1 cells outside the unit ball).
double modular_conjugate(const ScalarField& f, const ExponentMap& p);
double modular_conjugate(const VectorField& f, const ExponentMap& p);

/// Quadrature of moreau_integrand(|F|, p, tau).
double moreau_envelope(const ScalarField& f, const ExponentMap& p, double tau,
                       const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);
double moreau_envelope(const VectorField& f, const ExponentMap& p, double tau,
                       const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);

/// Cell-wise proximal map of tau * modular: keeps the direction of F(x)
/// and rescales the magnitude by prox_factor; zero cells stay zero.
ScalarField prox_modular(const ScalarField& f, const ExponentMap& p, double tau,
                         const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);
VectorField prox_modular(const VectorField& f, const ExponentMap& p, double tau,
                         const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);

/// Cell-wise proximal map of tau * conjugate, via prox_factor_conj.
ScalarField prox_modular_conj(const ScalarField& f, const ExponentMap& p, double tau,
                              const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);
VectorField prox_modular_conj(const VectorField& f, const ExponentMap& p, double tau,
                              const NewtonConfig& cfg = {}, KernelStats* stats = nullptr);

}  // namespace varlp
