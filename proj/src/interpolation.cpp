// SPDX-License-Identifier: Apache-2.0
#include "torusflow/interpolation.hpp"

#include "torusflow/error.hpp"

#include <cmath>
#include <string>

namespace torusflow {

namespace {

constexpr int kMaxDegree = 11;

}  // namespace

// 1 / Π_a Σ_m β(m) cos(m θ_a).
RealArray bspline_prefilter(const TorusGrid& g, int degree) {
  validate(InterpolationOptions{InterpolationScheme::bspline, degree});
  double w[kMaxDegree + 1];
  bspline_weights(degree, 0.0, w);
  const int half = (degree - 1) / 2;
  const int n = g.n();
  RealArray axis_symbol(n);
  for (int i = 0; i < n; ++i) {
    const double theta = kTwoPi * g.wavenumber_of(i) / n;
    double s = 0.0;
    for (int m = 0; m <= degree; ++m) s += w[m] * std::cos((m - half) * theta);
    axis_symbol[i] = s;
  }
  RealArray sym = RealArray::Ones(g.size());
  for (int a = 0; a < g.dim(); ++a) {
    const auto& k = g.wavenumbers(a);
    for (Index f = 0; f < g.size(); ++f) sym[f] /= axis_symbol[(k[f] + n) % n];
  }
  return sym;
}

void bspline_weights(int degree, double t, double* w) {
  w[0] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    const double inv = 1.0 / d;
    w[d] = (t + d - d) * inv * w[d - 1];
    for (int m = d - 1; m >= 1; --m) w[m] = ((t + d - m) * w[m - 1] + (m + 1 - t) * w[m]) * inv;
    w[0] = (1.0 - t) * inv * w[0];
  }
}

void validate(const InterpolationOptions& opts) {
  if (opts.scheme == InterpolationScheme::bspline &&
      (opts.degree < 1 || opts.degree > kMaxDegree || opts.degree % 2 == 0)) {
    throw Error(ErrorKind::InvalidArgument,
                "B-spline degree must be odd and in [1, 11], got " + std::to_string(opts.degree));
  }
}

Interpolant::Interpolant(const std::vector<ScalarField>& fields, InterpolationOptions opts)
    : grid_(fields.at(0).grid()), opts_(opts) {
  validate(opts_);
  if (opts_.scheme == InterpolationScheme::bspline) {
    const RealArray sym = bspline_prefilter(grid_, opts_.degree);
    for (const auto& f : fields) {
      require_same_grid(grid_, f.grid(), "Interpolant");
      data_.push_back(grid_.inverse_real(f.spectral() * sym.cast<Complex>()));
    }
  } else {
    for (const auto& f : fields) {
      require_same_grid(grid_, f.grid(), "Interpolant");
      data_.push_back(RealArray());
      spectra_.push_back(f.spectral());
    }
  }
}

Interpolant Interpolant::from_coefficients(const TorusGrid& grid, std::vector<RealArray> coeffs, int degree) {
  Interpolant it(grid, InterpolationOptions{InterpolationScheme::bspline, degree});
  validate(it.opts_);
  for (const auto& c : coeffs) {
    if (c.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "coefficient array does not match grid");
  }
  it.data_ = std::move(coeffs);
  return it;
}

Interpolant::Interpolant(const ScalarField& f, InterpolationOptions opts)
    : Interpolant(std::vector<ScalarField>{f}, opts) {}

Interpolant::Interpolant(const VectorField& u, InterpolationOptions opts) : Interpolant(u.data(), opts) {}

void Interpolant::evaluate_bspline(const double* x, double* out) const {
  const int d = grid_.dim();
  const int n = grid_.n();
  const int deg = opts_.degree;
  const int taps = deg + 1;
  const int half = (deg - 1) / 2;
  const double inv_h = n / kTwoPi;
  double w[kMaxDim][kMaxDegree + 1];
  Index off[kMaxDim][kMaxDegree + 1];
  for (int a = 0; a < d; ++a) {
    const double s = x[a] * inv_h;
    const double fl = std::floor(s);
    bspline_weights(deg, s - fl, w[a]);
    long base = static_cast<long>(fl) - half;
    base %= n;
    if (base < 0) base += n;
    const Index stride = grid_.stride(a);
    for (int m = 0; m < taps; ++m) {
      long j = base + m;
      if (j >= n) j -= n;
      off[a][m] = j * stride;
    }
  }
  const int nc = components();
  for (int c = 0; c < nc; ++c) out[c] = 0.0;
  if (d == 1) {
    for (int c = 0; c < nc; ++c) {
      const double* v = data_[c].data();
      double acc = 0.0;
      for (int m = 0; m < taps; ++m) acc += w[0][m] * v[off[0][m]];
      out[c] = acc;
    }
    return;
  }
  if (d == 2) {
    for (int c = 0; c < nc; ++c) {
      const double* v = data_[c].data();
      double acc = 0.0;
      for (int m0 = 0; m0 < taps; ++m0) {
        const double* row = v + off[0][m0];
        double r = 0.0;
        for (int m1 = 0; m1 < taps; ++m1) r += w[1][m1] * row[off[1][m1]];
        acc += w[0][m0] * r;
      }
      out[c] = acc;
    }
    return;
  }
  // General dimension: odometer over all tap combinations.
  std::array<int, kMaxDim> m{};
  while (true) {
    double weight = 1.0;
    Index flat = 0;
    for (int a = 0; a < d; ++a) {
      weight *= w[a][m[a]];
      flat += off[a][m[a]];
    }
    for (int c = 0; c < nc; ++c) out[c] += weight * data_[c][flat];
    int a = d - 1;
    while (a >= 0 && ++m[a] == taps) m[a--] = 0;
    if (a < 0) break;
  }
}

void Interpolant::evaluate_trig(const double* x, double* out) const {
  const int d = grid_.dim();
  const int n = grid_.n();
  std::array<std::vector<Complex>, kMaxDim> phase;
  for (int a = 0; a < d; ++a) {
    phase[a].resize(n);
    for (int i = 0; i < n; ++i) phase[a][i] = std::polar(1.0, grid_.wavenumber_of(i) * x[a]);
  }
  const int nc = components();
  for (int c = 0; c < nc; ++c) out[c] = 0.0;
  for (Index f = 0; f < grid_.size(); ++f) {
    Complex e = 1.0;
    for (int a = 0; a < d; ++a) e *= phase[a][(f / grid_.stride(a)) % n];
    for (int c = 0; c < nc; ++c) out[c] += (spectra_[c][f] * e).real();
  }
}

Eigen::MatrixXd Interpolant::evaluate(const PointSet& points) const {
  if (points.rows() != grid_.dim()) {
    throw Error(ErrorKind::WrongDimension, "points have " + std::to_string(points.rows()) +
                                               " coordinates, grid has " + std::to_string(grid_.dim()));
  }
  Eigen::MatrixXd out(components(), points.cols());
  for (Index p = 0; p < points.cols(); ++p) {
    if (opts_.scheme == InterpolationScheme::bspline) {
      evaluate_bspline(points.col(p).data(), out.col(p).data());
    } else {
      evaluate_trig(points.col(p).data(), out.col(p).data());
    }
  }
  return out;
}

std::vector<RealArray> Interpolant::evaluate_displaced(const VectorField& displacement) const {
  const Eigen::MatrixXd vals = evaluate(displaced_points(displacement));
  std::vector<RealArray> out;
  for (int c = 0; c < components(); ++c) out.push_back(vals.row(c).transpose().array());
  return out;
}

std::vector<double> evaluate_at(const ScalarField& f, const PointSet& points, InterpolationOptions opts) {
  const Eigen::MatrixXd v = Interpolant(f, opts).evaluate(points);
  return std::vector<double>(v.data(), v.data() + v.size());
}

PointSet grid_points(const TorusGrid& grid) {
  PointSet p(grid.dim(), grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) p(a, i) = grid.coordinate(i, a);
  }
  return p;
}

PointSet displaced_points(const VectorField& displacement) {
  const auto& g = displacement.grid();
  if (displacement.components() != g.dim()) throw Error(ErrorKind::WrongDimension, "displacement needs dim components");
  PointSet p = grid_points(g);
  for (int a = 0; a < g.dim(); ++a) p.row(a) += displacement[a].values().matrix().transpose();
  return p;
}

}  // namespace torusflow
