// SPDX-License-Identifier: Apache-2.0
#include "torusflow/random_fields.hpp"

#include "torusflow/error.hpp"
#include "torusflow/spectral.hpp"

#include <cmath>
#include <vector>

namespace torusflow {

namespace {

bool inside(const TorusGrid& g, Index f, int max_mode) {
  for (int a = 0; a < g.dim(); ++a) {
    const int k = g.wavenumbers(a)[f];
    if (std::abs(k) > max_mode || g.is_nyquist(k)) return false;
  }
  return true;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScalarField random_bandlimited(const TorusGrid& grid, int max_mode, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexArray s = ComplexArray::Zero(grid.size());
  for (Index f = 1; f < grid.size(); ++f) {
    if (!inside(grid, f, max_mode)) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    s[f] = Complex(re, im);
  }
  return ScalarField::from_spectral(grid, s);
}

VectorField random_bandlimited_vector(const TorusGrid& grid, int max_mode, Rng& rng) {
  std::vector<ScalarField> c;
  for (int a = 0; a < grid.dim(); ++a) c.push_back(random_bandlimited(grid, max_mode, rng));
  return VectorField(std::move(c));
}

VectorField random_divergence_free(const TorusGrid& grid, int max_mode, double amplitude, Rng& rng) {
  VectorField u = hodge_decompose(random_bandlimited_vector(grid, max_mode, rng)).divfree_part;
  const double m = u.max_abs();
  if (m == 0.0) throw Error(ErrorKind::ZeroField, "random field vanished");
  return (amplitude / m) * u;
}

ScalarField power_law_field(const TorusGrid& grid, double decay, int max_mode, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  ComplexArray s = ComplexArray::Zero(grid.size());
  std::vector<bool> done(grid.size(), false);
  const RealArray& k2 = grid.wavenumber_sq();
  for (Index f = 1; f < grid.size(); ++f) {
    if (done[f] || !inside(grid, f, max_mode) || std::lround(std::sqrt(k2[f])) > max_mode) continue;
    auto idx = grid.multi_index(f);
    for (int a = 0; a < grid.dim(); ++a) idx[a] = -idx[a];
    const Index partner = grid.flat_index(idx);
    const Complex c = std::polar(std::pow(k2[f], -0.5 * decay), uniform(rng));
    s[f] = c;
    s[partner] = std::conj(c);
    done[f] = done[partner] = true;
  }
  return ScalarField::from_symmetric_spectral(grid, std::move(s));
}

VectorField power_law_divergence_free(const TorusGrid& grid, double decay, int max_mode, double amplitude,
                                      Rng& rng) {
  if (grid.dim() != 2) throw Error(ErrorKind::WrongDimension, "power-law divergence-free fields are built on 2D grids");
  VectorField u = perp_gradient(power_law_field(grid, decay + 1.0, max_mode, rng));
  const double m = u.max_abs();
  return (amplitude / m) * u;
}

}  // namespace torusflow
