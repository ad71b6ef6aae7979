// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/regularity.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace torusflow {

/// Time-1 map of the geodesic from u₀. For the axisymmetric family the planar map is lifted back to 3D.
DiffeoMap exp_map(const VectorField& u0, const MetricConfig& config, double dt, InterpolationOptions interp = {});

/// Central difference (exp(u₀ + h·w) − exp(u₀ − h·w))/(2h) of the displacements.
/// `w` must have unit L² norm. h ≤ 0 selects 1e−4·(1 + ‖u₀‖).
VectorField dexp_action(const VectorField& u0, const VectorField& w, const MetricConfig& config, double dt,
                        double h = 0.0, InterpolationOptions interp = {});

/// L²-orthonormal basis of the family's admissible fields with |k_a| ≤ max_mode, one column per
/// field, flattened component-major and scaled by the square root of the cell volume.
Eigen::MatrixXd admissible_basis(const TorusGrid& grid, const MetricConfig& config, int max_mode);
VectorField from_coefficients(const TorusGrid& grid, int components, const Eigen::MatrixXd& basis,
                              const Eigen::VectorXd& c);

/// Condition number of the finite-difference d exp at u₀ restricted to modes ≤ max_mode.
double dexp_condition(const VectorField& u0, const MetricConfig& config, double dt, int max_mode,
                      InterpolationOptions interp = {});

struct ShootingProblem {
  DiffeoMap target;
  MetricConfig config;
  double dt = 2e-3;
  /// Relative L² displacement residual.
  double tol = 1e-6;
  /// Gauss-Newton iterations per level.
  int max_iter = 20;
  /// Mode cutoffs; 0 stands for every mode below Nyquist.
  std::vector<int> coarse_to_fine{2, 4, 8, 0};
  double basin_guard = 0.5;
  InterpolationOptions interp{InterpolationScheme::bspline, 3};
};

struct ShootingReport {
  VectorField u0;
  /// Relative residual after each accepted step, starting with the initial guess.
  std::vector<double> residual_history;
  bool converged = false;
  double dexp_condition = 0.0;
  int exp_evaluations = 0;
  /// Why the solve stopped short, when it did.
  std::string failure;
};

/// Gauss-Newton on ½‖exp(u₀) − η‖² with the reduced Jacobian assembled from dexp actions and the
/// normal equations solved by conjugate gradients, over increasing mode cutoffs.
ShootingReport shoot(const ShootingProblem& problem);
void validate(const ShootingProblem& problem);

struct RegularityComparison {
  /// Reference spectrum: the forward initial velocity when known, else the target displacement.
  RegularityReport target;
  RegularityReport recovered;
  /// Both slopes are fitted over shells up to the target's largest shell with energy.
  int fit_radius = 0;
  bool slope_defined = false;
  double target_slope = 0.0;
  double recovered_slope = 0.0;
  double slope_difference = 0.0;
  /// Energy fraction beyond radius n/4.
  double target_tail = 0.0;
  double recovered_tail = 0.0;
  bool recovered_steep = false;
};

/// Throws NotConverged unless the report converged.
RegularityComparison regularity_experiment(const ShootingProblem& problem, const ShootingReport& report,
                                           const VectorField* forward = nullptr);

}  // namespace torusflow
