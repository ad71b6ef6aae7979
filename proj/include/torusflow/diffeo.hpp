// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/field.hpp"
#include "torusflow/interpolation.hpp"

#include <functional>
#include <vector>

namespace torusflow {

/// Torus diffeomorphism γ(x) = x + displacement(x) with cached Jacobian Dγ.
class DiffeoMap {
 public:
  /// Jacobian from spectral differentiation of the displacement.
  explicit DiffeoMap(VectorField displacement);
  /// Jacobian supplied by the caller, row-major: entry i·dim + j is ∂γ_i/∂x_j.
  DiffeoMap(VectorField displacement, std::vector<ScalarField> jacobian);

  const TorusGrid& grid() const noexcept { return disp_.grid(); }
  int dim() const noexcept { return disp_.grid().dim(); }
  const VectorField& displacement() const noexcept { return disp_; }
  const ScalarField& jacobian(int i, int j) const { return jac_.at(i * dim() + j); }
  const std::vector<ScalarField>& jacobian() const noexcept { return jac_; }
  /// det Dγ at every node.
  RealArray determinant() const;
  /// γ(x) at every node, not reduced modulo 2π.
  PointSet positions() const;

 private:
  VectorField disp_;
  std::vector<ScalarField> jac_;
};

/// Identity-plus-displacement Jacobian computed spectrally.
std::vector<ScalarField> spectral_jacobian(const VectorField& displacement);
/// Determinant of a row-major dim×dim matrix of fields, per node.
RealArray determinant(const std::vector<ScalarField>& m, int dim);

DiffeoMap identity_map(const TorusGrid& grid);
DiffeoMap translation_map(const TorusGrid& grid, const std::vector<double>& shift);

ScalarField pullback(const ScalarField& f, const DiffeoMap& gamma, InterpolationOptions opts = {});
/// u∘γ, componentwise.
VectorField pullback(const VectorField& u, const DiffeoMap& gamma, InterpolationOptions opts = {});
/// a∘b.
DiffeoMap compose(const DiffeoMap& a, const DiffeoMap& b, InterpolationOptions opts = {});

struct InversionOptions {
  int max_iter = 200;
  /// Largest Newton step fraction; steps are halved while the residual grows.
  double damping = 1.0;
  double tol = 1e-9;
  double min_det = 0.1;
  InterpolationOptions interp{};
};

/// γ⁻¹ by Newton iteration y ← y − Dγ(y)⁻¹(γ(y) − x) with backtracking.
/// `warm_start` (an approximate inverse) seeds the iteration when given.
DiffeoMap invert_map(const DiffeoMap& gamma, const InversionOptions& opts = {}, const DiffeoMap* warm_start = nullptr);

/// max |det Dγ − 1| over nodes.
double volume_defect(const DiffeoMap& gamma);

enum class JacobianMode { spectral_diff, transport_ode };

struct FlowIntegratorConfig {
  double dt = 1e-2;
  JacobianMode jacobian_mode = JacobianMode::spectral_diff;
  InterpolationOptions interp{};
};

void validate(const FlowIntegratorConfig& cfg);

/// Eulerian velocity at time t.
using VelocityProvider = std::function<VectorField(double)>;

/// Throws CflViolation unless dt·max|u| < 0.5·cell size.
void check_cfl(const VectorField& u, double dt);
void check_cfl(double max_speed, const TorusGrid& grid, double dt);

/// One RK4 step of dγ/dt = u(t)∘γ. The Jacobian follows cfg.jacobian_mode.
DiffeoMap advance_flow(const DiffeoMap& gamma, const VelocityProvider& u, double t, double dt,
                       const FlowIntegratorConfig& cfg = {});

/// One RK4 step of d(Dγ)/dt = (Du∘γ)·Dγ, integrated together with the flow that carries it.
/// Returns the new Jacobian, row-major.
std::vector<ScalarField> transport_jacobian_step(const std::vector<ScalarField>& jacobian, const VelocityProvider& u,
                                                 const DiffeoMap& gamma, double t, double dt,
                                                 InterpolationOptions opts = {});

/// Integrates the flow of u from the identity over [0, T] with steps of cfg.dt.
DiffeoMap integrate_flow(const VelocityProvider& u, const TorusGrid& grid, double T,
                         const FlowIntegratorConfig& cfg = {});

/// Provider that linearly interpolates velocity snapshots given at increasing times.
VelocityProvider snapshot_provider(std::vector<double> times, std::vector<VectorField> velocities);

}  // namespace torusflow
