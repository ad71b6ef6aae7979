// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/grid.hpp"

#include <functional>
#include <initializer_list>
#include <vector>

namespace torusflow {

using Point = std::array<double, kMaxDim>;

/// Real periodic field sampled on a TorusGrid, with its normalized spectrum.
///
/// Both representations are kept in sync at construction; the type is
/// immutable apart from assignment.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid);
  ScalarField(const TorusGrid& grid, RealArray values);

  /// Builds from Fourier coefficients. The imaginary part of the inverse
  /// transform is discarded and the stored spectrum recomputed from the values.
  static ScalarField from_spectral(const TorusGrid& grid, const ComplexArray& spectral);
  /// Trusts that `spectral` is conjugate symmetric; skips the forward transform.
  static ScalarField from_symmetric_spectral(const TorusGrid& grid, ComplexArray spectral);
  static ScalarField from_function(const TorusGrid& grid, const std::function<double(const Point&)>& f);
  static ScalarField constant(const TorusGrid& grid, double c);
  /// Takes both representations as given; the caller guarantees they agree.
  static ScalarField from_parts(const TorusGrid& grid, RealArray values, ComplexArray spectral);

  const TorusGrid& grid() const noexcept { return grid_; }
  const RealArray& values() const noexcept { return values_; }
  const ComplexArray& spectral() const noexcept { return spectral_; }
  Index size() const noexcept { return values_.size(); }

  double mean() const noexcept { return spectral_[0].real(); }
  double max_abs() const noexcept { return values_.abs().maxCoeff(); }
  /// sqrt of the grid quadrature of f² over [0, 2π)^dim.
  double l2_norm() const noexcept;
  /// Root mean square of the samples.
  double rms() const noexcept;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);

 private:
  ScalarField(const TorusGrid& grid, RealArray values, ComplexArray spectral);

  TorusGrid grid_;
  RealArray values_;
  ComplexArray spectral_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);
ScalarField operator*(ScalarField f, double a);
/// Pointwise product, no dealiasing.
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
/// Grid quadrature of a·b over the torus.
double l2_inner(const ScalarField& a, const ScalarField& b);

/// Ordered collection of scalar components on one grid.
class VectorField {
 public:
  /// Zero field with `components` entries (defaults to grid.dim()).
  explicit VectorField(const TorusGrid& grid, int components = -1);
  explicit VectorField(std::vector<ScalarField> components);
  VectorField(std::initializer_list<ScalarField> components);

  static VectorField constant(const TorusGrid& grid, const std::vector<double>& c);

  const TorusGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int i) const { return comps_.at(i); }
  ScalarField& operator[](int i) { return comps_.at(i); }
  const std::vector<ScalarField>& data() const noexcept { return comps_; }

  std::vector<double> mean() const;
  double max_abs() const noexcept;
  /// Pointwise Euclidean magnitude, maximized over nodes.
  double max_norm() const noexcept;
  double l2_norm() const noexcept;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double a);

 private:
  TorusGrid grid_;
  std::vector<ScalarField> comps_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double a, VectorField f);
VectorField operator*(VectorField f, double a);
double l2_inner(const VectorField& a, const VectorField& b);

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what);

}  // namespace torusflow
