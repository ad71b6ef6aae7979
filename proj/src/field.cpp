// SPDX-License-Identifier: Apache-2.0
#include "torusflow/field.hpp"

#include "torusflow/error.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace torusflow {

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, std::string(what) + ": fields live on different grids");
}

ScalarField::ScalarField(const TorusGrid& grid)
    : grid_(grid), values_(RealArray::Zero(grid.size())), spectral_(ComplexArray::Zero(grid.size())) {}

ScalarField::ScalarField(const TorusGrid& grid, RealArray values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::InvalidArgument, "sample count " + std::to_string(values_.size()) +
                                                " does not match grid size " + std::to_string(grid_.size()));
  }
  grid_.forward(values_, spectral_);
}

ScalarField::ScalarField(const TorusGrid& grid, RealArray values, ComplexArray spectral)
    : grid_(grid), values_(std::move(values)), spectral_(std::move(spectral)) {}

ScalarField ScalarField::from_spectral(const TorusGrid& grid, const ComplexArray& spectral) {
  if (spectral.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "spectrum size does not match grid");
  return ScalarField(grid, grid.inverse_real(spectral));
}

ScalarField ScalarField::from_symmetric_spectral(const TorusGrid& grid, ComplexArray spectral) {
  if (spectral.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "spectrum size does not match grid");
  RealArray values = grid.inverse_real(spectral);
  return ScalarField(grid, std::move(values), std::move(spectral));
}

ScalarField ScalarField::from_function(const TorusGrid& grid, const std::function<double(const Point&)>& f) {
  RealArray v(grid.size());
  Point x{};
  for (Index i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(i, a);
    v[i] = f(x);
  }
  return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::constant(const TorusGrid& grid, double c) {
  ComplexArray s = ComplexArray::Zero(grid.size());
  s[0] = c;
  return ScalarField(grid, RealArray::Constant(grid.size(), c), std::move(s));
}

ScalarField ScalarField::from_parts(const TorusGrid& grid, RealArray values, ComplexArray spectral) {
  if (values.size() != grid.size() || spectral.size() != grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "field data does not match grid");
  }
  return ScalarField(grid, std::move(values), std::move(spectral));
}

double ScalarField::l2_norm() const noexcept { return std::sqrt(grid_.cell_volume() * values_.square().sum()); }

double ScalarField::rms() const noexcept { return std::sqrt(values_.square().mean()); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator+=");
  values_ += o.values_;
  spectral_ += o.spectral_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator-=");
  values_ -= o.values_;
  spectral_ -= o.spectral_;
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  values_ *= a;
  spectral_ *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }
ScalarField operator*(ScalarField f, double a) { return f *= a; }

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_product");
  return ScalarField(a.grid(), a.values() * b.values());
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "l2_inner");
  return a.grid().cell_volume() * (a.values() * b.values()).sum();
}

VectorField::VectorField(const TorusGrid& grid, int components) : grid_(grid) {
  const int m = components < 0 ? grid.dim() : components;
  comps_.assign(m, ScalarField(grid));
}

VectorField::VectorField(std::vector<ScalarField> components) : grid_(components.at(0).grid()), comps_(std::move(components)) {
  for (const auto& c : comps_) require_same_grid(grid_, c.grid(), "VectorField");
}

VectorField::VectorField(std::initializer_list<ScalarField> components)
    : VectorField(std::vector<ScalarField>(components)) {}

VectorField VectorField::constant(const TorusGrid& grid, const std::vector<double>& c) {
  std::vector<ScalarField> comps;
  for (double v : c) comps.push_back(ScalarField::constant(grid, v));
  return VectorField(std::move(comps));
}

std::vector<double> VectorField::mean() const {
  std::vector<double> m;
  for (const auto& c : comps_) m.push_back(c.mean());
  return m;
}

double VectorField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

double VectorField::max_norm() const noexcept {
  RealArray sq = RealArray::Zero(grid_.size());
  for (const auto& c : comps_) sq += c.values().square();
  return std::sqrt(sq.maxCoeff());
}

double VectorField::l2_norm() const noexcept {
  double s = 0.0;
  for (const auto& c : comps_) s += c.values().square().sum();
  return std::sqrt(grid_.cell_volume() * s);
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (o.components() != components()) throw Error(ErrorKind::InvalidArgument, "component count mismatch");
  for (int i = 0; i < components(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  if (o.components() != components()) throw Error(ErrorKind::InvalidArgument, "component count mismatch");
  for (int i = 0; i < components(); ++i) comps_[i] -= o.comps_[i];
  return *this;
}

VectorField& VectorField::operator*=(double a) {
  for (auto& c : comps_) c *= a;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double a, VectorField f) { return f *= a; }
VectorField operator*(VectorField f, double a) { return f *= a; }

double l2_inner(const VectorField& a, const VectorField& b) {
  if (a.components() != b.components()) throw Error(ErrorKind::InvalidArgument, "component count mismatch");
  double s = 0.0;
  for (int i = 0; i < a.components(); ++i) s += l2_inner(a[i], b[i]);
  return s;
}

}  // namespace torusflow
