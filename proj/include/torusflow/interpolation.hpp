// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace torusflow {

/// Columns are points, rows are coordinates.
using PointSet = Eigen::MatrixXd;

enum class InterpolationScheme { bspline, trigonometric };

struct InterpolationOptions {
  InterpolationScheme scheme = InterpolationScheme::bspline;
  /// Odd B-spline degree.
  int degree = 7;
};

void validate(const InterpolationOptions& opts);

/// Periodic interpolant for one or more fields on a shared grid.
///
/// The B-spline scheme prefilters the samples spectrally so the spline passes
/// through every node; evaluation then costs (degree+1)^dim per point. The
/// trigonometric scheme sums the full Fourier series and is exact for
/// band-limited data.
class Interpolant {
 public:
  Interpolant(const std::vector<ScalarField>& fields, InterpolationOptions opts = {});
  explicit Interpolant(const ScalarField& f, InterpolationOptions opts = {});
  explicit Interpolant(const VectorField& u, InterpolationOptions opts = {});
  /// B-spline interpolant from already prefiltered coefficient arrays.
  static Interpolant from_coefficients(const TorusGrid& grid, std::vector<RealArray> coeffs, int degree);

  int components() const noexcept { return static_cast<int>(data_.size()); }
  const TorusGrid& grid() const noexcept { return grid_; }

  /// components × points matrix of values.
  Eigen::MatrixXd evaluate(const PointSet& points) const;
  /// Values at x + displacement(x) for every node x, one array per component.
  std::vector<RealArray> evaluate_displaced(const VectorField& displacement) const;

 private:
  Interpolant(const TorusGrid& grid, InterpolationOptions opts) : grid_(grid), opts_(opts) {}
  void evaluate_bspline(const double* x, double* out) const;
  void evaluate_trig(const double* x, double* out) const;

  TorusGrid grid_;
  InterpolationOptions opts_;
  // Spline coefficients (bspline) or spectra (trigonometric), one per component.
  std::vector<RealArray> data_;
  std::vector<ComplexArray> spectra_;
};

std::vector<double> evaluate_at(const ScalarField& f, const PointSet& points, InterpolationOptions opts = {});

/// Spectral prefilter turning samples into B-spline coefficients, per flat spectral index.
RealArray bspline_prefilter(const TorusGrid& grid, int degree);

/// Uniform B-spline weights of `degree` at fractional offset t in [0, 1).
/// Entry m multiplies the node floor(x/h) − (degree−1)/2 + m.
void bspline_weights(int degree, double t, double* w);

/// Node coordinates x for every grid point, as a PointSet.
PointSet grid_points(const TorusGrid& grid);
/// x + displacement(x) for every node.
PointSet displaced_points(const VectorField& displacement);

}  // namespace torusflow
