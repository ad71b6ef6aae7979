// SPDX-License-Identifier: Apache-2.0
// Slow reference implementations used only by tests.
#pragma once

#include "torusflow/field.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using namespace torusflow;

using Wavevector = std::array<int, kMaxDim>;

inline Wavevector wavevector(const TorusGrid& g, Index f) {
  Wavevector k{};
  const auto idx = g.multi_index(f);
  for (int a = 0; a < g.dim(); ++a) k[a] = g.wavenumber_of(idx[a]);
  return k;
}

/// Direct double sum: f̂(k) = N⁻¹ Σ_x f(x) e^{−ik·x}.
inline ComplexArray dft(const TorusGrid& g, const RealArray& v) {
  ComplexArray out = ComplexArray::Zero(g.size());
  for (Index f = 0; f < g.size(); ++f) {
    const auto k = wavevector(g, f);
    Complex acc = 0.0;
    for (Index p = 0; p < g.size(); ++p) {
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += k[a] * g.coordinate(p, a);
      acc += v[p] * std::polar(1.0, -phase);
    }
    out[f] = acc / static_cast<double>(g.size());
  }
  return out;
}

/// Σ_k symbol(k) ĉ(k) e^{ik·x} at every node, real part.
inline RealArray synthesize(const TorusGrid& g, const ComplexArray& c,
                            const std::function<Complex(const Wavevector&)>& symbol) {
  RealArray out(g.size());
  std::vector<Complex> weighted(g.size());
  std::vector<Wavevector> ks(g.size());
  for (Index f = 0; f < g.size(); ++f) {
    ks[f] = wavevector(g, f);
    weighted[f] = symbol(ks[f]) * c[f];
  }
  for (Index p = 0; p < g.size(); ++p) {
    Complex acc = 0.0;
    for (Index f = 0; f < g.size(); ++f) {
      if (weighted[f] == Complex(0.0)) continue;
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += ks[f][a] * g.coordinate(p, a);
      acc += weighted[f] * std::polar(1.0, phase);
    }
    out[p] = acc.real();
  }
  return out;
}

/// Exact Fourier-series value of a field at an arbitrary point.
inline double fourier_value(const ScalarField& f, const Point& x) {
  const auto& g = f.grid();
  Complex acc = 0.0;
  for (Index m = 0; m < g.size(); ++m) {
    const auto k = wavevector(g, m);
    double phase = 0.0;
    for (int a = 0; a < g.dim(); ++a) phase += k[a] * x[a];
    acc += f.spectral()[m] * std::polar(1.0, phase);
  }
  return acc.real();
}

inline double rel_diff(const RealArray& a, const RealArray& b) {
  const double scale = std::max(b.abs().maxCoeff(), 1e-300);
  return (a - b).abs().maxCoeff() / scale;
}

inline double l2_rel(const ScalarField& a, const ScalarField& b) {
  return (a - b).l2_norm() / std::max(b.l2_norm(), 1e-300);
}

inline double l2_rel(const VectorField& a, const VectorField& b) {
  return (a - b).l2_norm() / std::max(b.l2_norm(), 1e-300);
}

/// Periodic spectral differentiation matrix for the second derivative on n points.
inline Eigen::MatrixXd second_derivative_matrix(int n) {
  const double h = kTwoPi / n;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = -M_PI * M_PI / (3.0 * h * h) - 1.0 / 6.0;
      } else {
        const double s = std::sin((i - j) * h / 2.0);
        d(i, j) = -((i - j) % 2 == 0 ? 1.0 : -1.0) / (2.0 * s * s);
      }
    }
  }
  return d;
}

/// Periodic spectral first-derivative matrix on n points (n even).
inline Eigen::MatrixXd first_derivative_matrix(int n) {
  const double h = kTwoPi / n;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = 0.5 * ((i - j) % 2 == 0 ? 1.0 : -1.0) / std::tan((i - j) * h / 2.0);
    }
  }
  return d;
}

}  // namespace oracle
