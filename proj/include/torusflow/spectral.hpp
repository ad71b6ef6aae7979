// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/field.hpp"

namespace torusflow {

/// ∂f/∂x_axis. The Nyquist mode is dropped, so the result is real and zero-mean.
ScalarField derivative(const ScalarField& f, int axis);
/// ∂²f/∂x_i∂x_j. The pure second derivative keeps the Nyquist mode (symbol −k²).
ScalarField second_derivative(const ScalarField& f, int i, int j);

ScalarField laplacian(const ScalarField& f);
/// Solves Δg = f for zero-mean g. Throws NonZeroMean if f has a significant mean.
ScalarField inverse_laplacian(const ScalarField& f);
/// (−Δ)^power, i.e. multiplication by |ξ|^{2·power}. Negative powers need zero-mean input
/// and return zero-mean output; nonnegative powers zero the mean mode unless power == 0.
ScalarField fractional_laplacian(const ScalarField& f, double power);

VectorField laplacian(const VectorField& u);
VectorField fractional_laplacian(const VectorField& u, double power);

/// Throws NonZeroMean when |mean| exceeds 1e−10 times the RMS of f.
void require_zero_mean(const ScalarField& f, const char* what);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
/// ∂₁u₂ − ∂₂u₁ on a two-dimensional grid.
ScalarField rot(const VectorField& u);
/// (−∂₂f, ∂₁f) on a two-dimensional grid.
VectorField perp_gradient(const ScalarField& f);

/// Product with the 2/3 rule applied to both factors and to the result.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);
/// Keeps only modes with |k_a| <= cutoff on every axis.
ScalarField low_pass(const ScalarField& f, int cutoff);
VectorField low_pass(const VectorField& u, int cutoff);
/// Multiplies the spectrum by a real, even symbol given per flat spectral index.
ScalarField apply_symbol(const ScalarField& f, const RealArray& symbol);
/// Translates f by `shift` grid cells along each axis: g(x) = f(x + shift·h).
ScalarField shift_by_cells(const ScalarField& f, const std::array<int, kMaxDim>& shift);

struct HodgeParts {
  VectorField gradient_part;
  VectorField divfree_part;
  VectorField harmonic_part;
};

/// Splits u into a gradient, a divergence-free zero-mean part and its mean.
HodgeParts hodge_decompose(const VectorField& u);
/// Divergence-free part plus mean.
VectorField project_divergence_free(const VectorField& u);

enum class InertiaFamily { identity, bessel_power };

/// A^r = (1 − α²Δ)^r, or the identity.
struct InertiaSpec {
  int order_r = 0;
  double alpha = 1.0;
  InertiaFamily family = InertiaFamily::bessel_power;

  bool is_identity() const noexcept { return family == InertiaFamily::identity || order_r == 0; }
};

void validate(const InertiaSpec& spec);
/// Symbol of A^{power}: (1 + α²|ξ|²)^{r·power}, per flat spectral index.
RealArray inertia_symbol(const TorusGrid& grid, const InertiaSpec& spec, double power = 1.0);

ScalarField apply_inertia(const ScalarField& f, const InertiaSpec& spec);
VectorField apply_inertia(const VectorField& u, const InertiaSpec& spec);
ScalarField solve_inertia(const ScalarField& f, const InertiaSpec& spec);
VectorField solve_inertia(const VectorField& u, const InertiaSpec& spec);
/// A^{power} for any real power.
VectorField inertia_power(const VectorField& u, const InertiaSpec& spec, double power);

/// sqrt((2π)^dim Σ (1 + |ξ|²)^s |f̂(ξ)|²). For s = 0 this is the L² norm.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const VectorField& u, double s);
/// H^s inner product matching sobolev_norm.
double sobolev_inner(const VectorField& u, const VectorField& v, double s);

}  // namespace torusflow
