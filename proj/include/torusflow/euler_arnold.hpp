// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/diffeo.hpp"
#include "torusflow/metric.hpp"

#include <string>
#include <vector>

namespace torusflow {

struct IntegrationOptions {
  double T = 1.0;
  double dt = 1e-3;
  /// Stored samples on [0, T], endpoints included. T/(checkpoints−1) must be a multiple of dt.
  int checkpoints = 101;
  InterpolationOptions interp{};
  /// Compute per-checkpoint conservation diagnostics.
  bool diagnostics = true;
};

void validate(const IntegrationOptions& opts);

/// Time-sampled geodesic (γ(t), u(t)).
///
/// For the axisymmetric family the stored maps and velocities are the planar
/// ones on the transverse 2-torus; lift them with axisym_lift_map and
/// axisym_lift_velocity.
struct GeodesicTrajectory {
  MetricConfig config;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<DiffeoMap> maps;
  std::vector<VectorField> velocities;
  /// Scalar carried by the flow (vorticity, rot A^r u, φ, δω♭u) when the family has one.
  std::vector<ScalarField> transported;
  std::vector<std::string> diagnostic_names;
  std::vector<std::vector<double>> diagnostics;

  double diagnostic(std::size_t checkpoint, const std::string& name) const;
  /// Largest value of a diagnostic over all checkpoints.
  double max_diagnostic(const std::string& name) const;
};

/// u = ∇⊥Δ⁻¹ω + mean.
VectorField velocity_from_vorticity(const ScalarField& omega, const std::vector<double>& mean);
/// −u·∇ω with 2/3-rule dealiasing, u = velocity_from_vorticity(ω, mean).
ScalarField euler2d_rhs(const ScalarField& omega, const std::vector<double>& mean);

GeodesicTrajectory integrate_euler2d(const ScalarField& omega0, const std::vector<double>& mean,
                                     const IntegrationOptions& opts);
/// Transports q = rot(A^r u) and recovers u = ∇⊥Δ⁻¹A^{−r}q + mean.
GeodesicTrajectory integrate_higher_order_2d(const VectorField& u0, const InertiaSpec& inertia,
                                             const IntegrationOptions& opts);
/// Compressible H^r geodesic on T¹ or T² driven by the momentum law
/// det Dγ·Dγᵀ·(A^r u)∘γ = A^r u₀ together with dγ/dt = u∘γ.
GeodesicTrajectory integrate_epdiff_lagrangian(const VectorField& u0, const InertiaSpec& inertia,
                                               const IntegrationOptions& opts);
/// −1/(3·min u₀′): blowup time of the one-dimensional L² geodesic equation u_t + 3uu_x = 0.
double burgers_blowup_time(const ScalarField& u0);

struct AxisymmetricState {
  int killing_axis = 2;
  int n = 0;
  VectorField planar_velocity;
};

/// Transverse axes for a Killing axis, in the order that keeps orientation.
std::array<int, 2> transverse_axes(int killing_axis);
/// Validates independence of the Killing coordinate and zero swirl, then keeps the planar part.
AxisymmetricState axisym_reduce(const VectorField& u0, int killing_axis);
GeodesicTrajectory axisym_integrate(const AxisymmetricState& state, const IntegrationOptions& opts);
DiffeoMap axisym_lift_map(const DiffeoMap& planar, int killing_axis);
VectorField axisym_lift_velocity(const VectorField& planar, int killing_axis);
ScalarField axisym_lift_scalar(const ScalarField& planar, int killing_axis);
/// max |u·K| over nodes.
double swirl(const VectorField& u, int killing_axis);
/// curl(u)·K.
ScalarField axisym_phi(const VectorField& u, int killing_axis);

/// −div(J u) with J the standard symplectic matrix, blockwise [[0, −1], [1, 0]].
ScalarField symplectic_scalar(const VectorField& u);
/// J∇Δ⁻¹q + mean.
VectorField velocity_from_symplectic_scalar(const ScalarField& q, const std::vector<double>& mean);
/// Throws NotSymplecticField unless J u is a gradient plus a constant.
void validate_symplectic(const VectorField& u);
VectorField project_symplectic(const VectorField& u);
/// k = dim/2; dimension 4 is limited to 8 points per axis.
GeodesicTrajectory symplectic_integrate(const VectorField& u0, const IntegrationOptions& opts);

/// Throws NotDivergenceFree when ‖div u‖ exceeds 1e−10‖∇u‖.
void validate_divergence_free(const VectorField& u);

/// Checks u₀ against the family's admissible space.
void validate_admissible(const VectorField& u0, const MetricConfig& config);
/// Projects u₀ onto the family's admissible space.
VectorField project_admissible(const VectorField& u0, const MetricConfig& config);

/// Dispatches to the integrator for the configured family.
GeodesicTrajectory integrate_geodesic(const VectorField& u0, const MetricConfig& config,
                                      const IntegrationOptions& opts);

/// ⟨A^r u, u⟩_{L²}.
double metric_energy(const VectorField& u, const InertiaSpec& inertia);

/// ‖q∘γ − q₀‖/‖q₀‖ (absolute when q₀ = 0).
double transport_residual(const ScalarField& q, const DiffeoMap& gamma, const ScalarField& q0,
                          InterpolationOptions opts = {});
/// ‖(Δu)∘γ − Dγ·Δu₀‖/‖Δu₀‖.
double laplacian_adjoint_residual(const VectorField& u, const DiffeoMap& gamma, const VectorField& u0,
                                  InterpolationOptions opts = {});
/// ‖det Dγ·Dγᵀ·(A^r u)∘γ − A^r u₀‖/‖A^r u₀‖.
double momentum_residual(const VectorField& u, const DiffeoMap& gamma, const VectorField& u0,
                         const InertiaSpec& inertia, InterpolationOptions opts = {});

}  // namespace torusflow
