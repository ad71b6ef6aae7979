// SPDX-License-Identifier: Apache-2.0
#include "torusflow/spectral.hpp"

#include "torusflow/error.hpp"

#include <cmath>
#include <string>

namespace torusflow {

namespace {

const Complex kI(0.0, 1.0);

void check_axis(const TorusGrid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) {
    throw Error(ErrorKind::AxisOutOfRange,
                "axis " + std::to_string(axis) + " outside grid of dimension " + std::to_string(g.dim()));
  }
}

void check_dim2(const TorusGrid& g, const char* what) {
  if (g.dim() != 2) throw Error(ErrorKind::WrongDimension, std::string(what) + " needs a two-dimensional grid");
}

}  // namespace

void require_zero_mean(const ScalarField& f, const char* what) {
  if (std::abs(f.spectral()[0]) > 1e-10 * f.rms()) {
    throw Error(ErrorKind::NonZeroMean, std::string(what) + ": input mean " + std::to_string(f.mean()) +
                                            " is not zero");
  }
}

ScalarField derivative(const ScalarField& f, int axis) {
  const auto& g = f.grid();
  check_axis(g, axis);
  ComplexArray s = f.spectral() * (kI * g.odd_wavenumbers(axis).cast<Complex>());
  return ScalarField::from_symmetric_spectral(g, std::move(s));
}

ScalarField second_derivative(const ScalarField& f, int i, int j) {
  const auto& g = f.grid();
  check_axis(g, i);
  check_axis(g, j);
  RealArray sym;
  if (i == j) {
    sym = -g.wavenumbers(i).cast<double>().square();
  } else {
    sym = -(g.odd_wavenumbers(i) * g.odd_wavenumbers(j));
  }
  return apply_symbol(f, sym);
}

ScalarField apply_symbol(const ScalarField& f, const RealArray& symbol) {
  ComplexArray s = f.spectral() * symbol.cast<Complex>();
  return ScalarField::from_symmetric_spectral(f.grid(), std::move(s));
}

ScalarField laplacian(const ScalarField& f) { return apply_symbol(f, -f.grid().wavenumber_sq()); }

ScalarField inverse_laplacian(const ScalarField& f) {
  require_zero_mean(f, "inverse_laplacian");
  RealArray sym = -1.0 / f.grid().wavenumber_sq();
  sym[0] = 0.0;
  return apply_symbol(f, sym);
}

ScalarField fractional_laplacian(const ScalarField& f, double power) {
  if (power == 0.0) return f;
  if (power < 0.0) require_zero_mean(f, "fractional_laplacian");
  RealArray sym = f.grid().wavenumber_sq().pow(power);
  sym[0] = 0.0;
  return apply_symbol(f, sym);
}

VectorField laplacian(const VectorField& u) {
  std::vector<ScalarField> c;
  for (const auto& f : u.data()) c.push_back(laplacian(f));
  return VectorField(std::move(c));
}

VectorField fractional_laplacian(const VectorField& u, double power) {
  std::vector<ScalarField> c;
  for (const auto& f : u.data()) c.push_back(fractional_laplacian(f, power));
  return VectorField(std::move(c));
}

VectorField gradient(const ScalarField& f) {
  std::vector<ScalarField> c;
  for (int a = 0; a < f.grid().dim(); ++a) c.push_back(derivative(f, a));
  return VectorField(std::move(c));
}

ScalarField divergence(const VectorField& u) {
  const auto& g = u.grid();
  if (u.components() != g.dim()) throw Error(ErrorKind::WrongDimension, "divergence needs dim components");
  ComplexArray s = ComplexArray::Zero(g.size());
  for (int a = 0; a < g.dim(); ++a) s += u[a].spectral() * (kI * g.odd_wavenumbers(a).cast<Complex>());
  return ScalarField::from_symmetric_spectral(g, std::move(s));
}

ScalarField rot(const VectorField& u) {
  const auto& g = u.grid();
  check_dim2(g, "rot");
  if (u.components() != 2) throw Error(ErrorKind::WrongDimension, "rot needs a two-component field");
  ComplexArray s = kI * (u[1].spectral() * g.odd_wavenumbers(0).cast<Complex>() -
                         u[0].spectral() * g.odd_wavenumbers(1).cast<Complex>());
  return ScalarField::from_symmetric_spectral(g, std::move(s));
}

VectorField perp_gradient(const ScalarField& f) {
  check_dim2(f.grid(), "perp_gradient");
  return VectorField{-1.0 * derivative(f, 1), derivative(f, 0)};
}

ScalarField low_pass(const ScalarField& f, int cutoff) {
  const auto& g = f.grid();
  RealArray mask = RealArray::Ones(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    const auto& k = g.wavenumbers(a);
    for (Index i = 0; i < g.size(); ++i) {
      // The Nyquist mode has no conjugate partner; keep only if strictly inside.
      if (std::abs(k[i]) > cutoff || g.is_nyquist(k[i])) mask[i] = 0.0;
    }
  }
  return apply_symbol(f, mask);
}

VectorField low_pass(const VectorField& u, int cutoff) {
  std::vector<ScalarField> c;
  for (const auto& f : u.data()) c.push_back(low_pass(f, cutoff));
  return VectorField(std::move(c));
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "dealiased_product");
  const auto& g = a.grid();
  const RealArray& mask = g.dealias_mask();
  RealArray av = g.inverse_real(a.spectral() * mask.cast<Complex>());
  RealArray bv = g.inverse_real(b.spectral() * mask.cast<Complex>());
  ComplexArray s;
  g.forward(RealArray(av * bv), s);
  s *= mask.cast<Complex>();
  return ScalarField::from_symmetric_spectral(g, std::move(s));
}

ScalarField shift_by_cells(const ScalarField& f, const std::array<int, kMaxDim>& shift) {
  const auto& g = f.grid();
  RealArray v(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    auto idx = g.multi_index(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] += shift[a];
    v[i] = f.values()[g.flat_index(idx)];
  }
  return ScalarField(g, std::move(v));
}

HodgeParts hodge_decompose(const VectorField& u) {
  const auto& g = u.grid();
  const int d = g.dim();
  if (u.components() != d) throw Error(ErrorKind::WrongDimension, "hodge_decompose needs dim components");
  RealArray kt2 = RealArray::Zero(g.size());
  for (int a = 0; a < d; ++a) kt2 += g.odd_wavenumbers(a).square();
  ComplexArray dot = ComplexArray::Zero(g.size());
  for (int a = 0; a < d; ++a) dot += u[a].spectral() * g.odd_wavenumbers(a).cast<Complex>();
  // Modes whose odd symbol vanishes (mean and pure-Nyquist) carry no gradient.
  RealArray inv = (kt2 > 0.5).select(1.0 / kt2, 0.0);
  dot *= inv.cast<Complex>();

  std::vector<ScalarField> grad, divfree, harm;
  for (int a = 0; a < d; ++a) {
    ComplexArray gs = dot * g.odd_wavenumbers(a).cast<Complex>();
    ComplexArray ds = u[a].spectral() - gs;
    ds[0] = 0.0;
    grad.push_back(ScalarField::from_symmetric_spectral(g, std::move(gs)));
    divfree.push_back(ScalarField::from_symmetric_spectral(g, std::move(ds)));
    harm.push_back(ScalarField::constant(g, u[a].mean()));
  }
  return {VectorField(std::move(grad)), VectorField(std::move(divfree)), VectorField(std::move(harm))};
}

VectorField project_divergence_free(const VectorField& u) {
  auto parts = hodge_decompose(u);
  return parts.divfree_part + parts.harmonic_part;
}

void validate(const InertiaSpec& spec) {
  if (spec.order_r < 0) throw Error(ErrorKind::InvalidArgument, "inertia order must be nonnegative");
  if (!(spec.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "inertia alpha must be positive");
}

RealArray inertia_symbol(const TorusGrid& grid, const InertiaSpec& spec, double power) {
  validate(spec);
  if (spec.is_identity() || power == 0.0) return RealArray::Ones(grid.size());
  return (1.0 + spec.alpha * spec.alpha * grid.wavenumber_sq()).pow(spec.order_r * power);
}

ScalarField apply_inertia(const ScalarField& f, const InertiaSpec& spec) {
  if (spec.is_identity()) return f;
  return apply_symbol(f, inertia_symbol(f.grid(), spec, 1.0));
}

ScalarField solve_inertia(const ScalarField& f, const InertiaSpec& spec) {
  if (spec.is_identity()) return f;
  return apply_symbol(f, inertia_symbol(f.grid(), spec, -1.0));
}

VectorField inertia_power(const VectorField& u, const InertiaSpec& spec, double power) {
  if (spec.is_identity() || power == 0.0) return u;
  const RealArray sym = inertia_symbol(u.grid(), spec, power);
  std::vector<ScalarField> c;
  for (const auto& f : u.data()) c.push_back(apply_symbol(f, sym));
  return VectorField(std::move(c));
}

VectorField apply_inertia(const VectorField& u, const InertiaSpec& spec) { return inertia_power(u, spec, 1.0); }
VectorField solve_inertia(const VectorField& u, const InertiaSpec& spec) { return inertia_power(u, spec, -1.0); }

double sobolev_norm(const ScalarField& f, double s) {
  const auto& g = f.grid();
  RealArray w = (1.0 + g.wavenumber_sq()).pow(s);
  return std::sqrt(g.volume() * (w * f.spectral().abs2()).sum());
}

double sobolev_norm(const VectorField& u, double s) { return std::sqrt(std::max(0.0, sobolev_inner(u, u, s))); }

double sobolev_inner(const VectorField& u, const VectorField& v, double s) {
  require_same_grid(u.grid(), v.grid(), "sobolev_inner");
  if (u.components() != v.components()) throw Error(ErrorKind::InvalidArgument, "component count mismatch");
  const auto& g = u.grid();
  RealArray w = (1.0 + g.wavenumber_sq()).pow(s);
  double acc = 0.0;
  for (int a = 0; a < u.components(); ++a) {
    acc += (w * (u[a].spectral() * v[a].spectral().conjugate()).real()).sum();
  }
  return g.volume() * acc;
}

}  // namespace torusflow
