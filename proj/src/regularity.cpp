// SPDX-License-Identifier: Apache-2.0
#include "torusflow/regularity.hpp"

#include "torusflow/error.hpp"
#include "torusflow/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace torusflow {

namespace {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

SmallMatrix jacobian_at(const DiffeoMap& gamma, Index node) {
  const int d = gamma.dim();
  SmallMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = gamma.jacobian(i, j).values()[node];
  return m;
}

using NodeVectors = std::vector<RealArray>;

NodeVectors node_values(const VectorField& v) {
  NodeVectors out;
  for (const auto& c : v.data()) out.push_back(c.values());
  return out;
}

VectorField to_field(const TorusGrid& g, const NodeVectors& v) {
  std::vector<ScalarField> c;
  for (const auto& a : v) c.emplace_back(g, a);
  return VectorField(std::move(c));
}

// Dγ·v (transpose = false) or Dγᵀ·v, node by node.
NodeVectors apply_jacobian(const DiffeoMap& gamma, const NodeVectors& v, bool transpose = false) {
  const int d = gamma.dim();
  NodeVectors out(d, RealArray::Zero(gamma.grid().size()));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const RealArray& a = transpose ? gamma.jacobian(j, i).values() : gamma.jacobian(i, j).values();
      out[i] += a * v[j];
    }
  return out;
}

// Dγ⁻¹·v (or Dγ⁻ᵀ·v), node by node.
NodeVectors solve_jacobian(const DiffeoMap& gamma, const NodeVectors& v, bool transpose = false) {
  const int d = gamma.dim();
  const Index size = gamma.grid().size();
  NodeVectors out(d, RealArray(size));
  if (d == 1) {
    out[0] = v[0] / gamma.jacobian(0, 0).values();
    return out;
  }
  if (d == 2) {
    const RealArray& a = gamma.jacobian(0, 0).values();
    const RealArray& b = transpose ? gamma.jacobian(1, 0).values() : gamma.jacobian(0, 1).values();
    const RealArray& c = transpose ? gamma.jacobian(0, 1).values() : gamma.jacobian(1, 0).values();
    const RealArray& e = gamma.jacobian(1, 1).values();
    const RealArray det = a * e - b * c;
    out[0] = (e * v[0] - b * v[1]) / det;
    out[1] = (a * v[1] - c * v[0]) / det;
    return out;
  }
  SmallVector rhs(d);
  for (Index p = 0; p < size; ++p) {
    SmallMatrix m = jacobian_at(gamma, p);
    if (transpose) m.transposeInPlace();
    for (int i = 0; i < d; ++i) rhs[i] = v[i][p];
    const SmallVector x = m.partialPivLu().solve(rhs);
    for (int i = 0; i < d; ++i) out[i][p] = x[i];
  }
  return out;
}

int default_mode(const TorusGrid& g, int max_mode) { return max_mode > 0 ? max_mode : std::max(1, g.n() / 4); }

VectorField sample(const TorusGrid& g, const ScanOptions& scan, int i) {
  Rng rng(derive_seed(scan.seed, static_cast<std::uint64_t>(i)));
  VectorField v = random_bandlimited_vector(g, default_mode(g, scan.max_mode), rng);
  const double m = v.max_abs();
  return m > 0.0 ? (1.0 / m) * v : v;
}

void require_samples(const ScanOptions& scan) {
  if (scan.samples < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
}

ScalarField without_mean(ScalarField f) {
  f -= ScalarField::constant(f.grid(), f.mean());
  return f;
}

VectorField without_mean(const VectorField& v) {
  std::vector<ScalarField> c;
  for (const auto& a : v.data()) c.push_back(without_mean(a));
  return VectorField(std::move(c));
}

bool is_zero(const DiffeoMap& m) { return m.displacement().max_abs() == 0.0; }

std::vector<DiffeoMap> invert_all(const std::vector<DiffeoMap>& maps, const InversionOptions& inversion) {
  std::vector<DiffeoMap> inv;
  inv.reserve(maps.size());
  for (const auto& m : maps) inv.push_back(invert_map(m, inversion, inv.empty() ? nullptr : &inv.back()));
  return inv;
}

}  // namespace

// ---------------------------------------------------------------------------
// P_λ

PLambdaOperator build_p_lambda(const DiffeoMap& gamma, double lambda, InversionOptions inversion) {
  return build_p_lambda(gamma, invert_map(gamma, inversion), lambda, inversion.interp);
}

PLambdaOperator build_p_lambda(const DiffeoMap& gamma, const DiffeoMap& inverse, double lambda,
                               InterpolationOptions interp) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
  const int d = gamma.dim();
  const auto& g = gamma.grid();
  std::vector<ScalarField> p(d * d, ScalarField(g));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      RealArray acc = RealArray::Zero(g.size());
      for (int k = 0; k < d; ++k) acc += gamma.jacobian(i, k).values() * gamma.jacobian(j, k).values();
      ScalarField f(g, acc);
      if (!is_zero(inverse)) f = pullback(f, inverse, interp);
      p[i * d + j] = f;
      p[j * d + i] = f;
    }
  for (Index node = 0; node < g.size(); ++node) {
    SmallMatrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = p[i * d + j].values()[node];
    if (m.llt().info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "coefficient matrix is not positive definite at node " << node;
      throw Error(ErrorKind::InvalidArgument, msg.str());
    }
  }
  return {lambda, std::move(p), gamma};
}

VectorField apply_p_principal(const PLambdaOperator& P, const VectorField& v) {
  const int d = P.source_map.dim();
  std::vector<ScalarField> out;
  for (const auto& c : v.data()) {
    ScalarField acc(c.grid());
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const ScalarField term = dealiased_product(P.coeff(i, j), second_derivative(c, i, j));
        acc += i == j ? term : 2.0 * term;
      }
    out.push_back(std::move(acc));
  }
  return VectorField(std::move(out));
}

VectorField apply_p_lambda(const PLambdaOperator& P, const VectorField& v) {
  return P.lambda * v - apply_p_principal(P, v);
}

double rayleigh_quotient(const PLambdaOperator& P, const VectorField& v) {
  const double h1 = sobolev_inner(v, v, 1.0);
  if (!(h1 > 0.0)) throw Error(ErrorKind::ZeroField, "Rayleigh quotient of the zero field");
  return l2_inner(apply_p_lambda(P, v), v) / h1;
}

QuotientRange coercivity_scan(const PLambdaOperator& P, const ScanOptions& scan) {
  require_samples(scan);
  QuotientRange r{INFINITY, -INFINITY};
  for (int i = 0; i < scan.samples; ++i) {
    const double q = rayleigh_quotient(P, sample(P.source_map.grid(), scan, i));
    r.min = std::min(r.min, q);
    r.max = std::max(r.max, q);
  }
  return r;
}

LambdaSearch search_lambda(const GeodesicTrajectory& traj, const ScanOptions& scan, double target,
                           InversionOptions inversion) {
  require_samples(scan);
  if (traj.maps.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  const auto& g = traj.maps.front().grid();
  std::vector<VectorField> samples;
  for (int i = 0; i < scan.samples; ++i) samples.push_back(sample(g, scan, i));
  // q(λ) = (λ·a + b)/c per sample and checkpoint.
  struct Affine {
    double a, b, c;
  };
  std::vector<Affine> parts;
  const auto inverses = invert_all(traj.maps, inversion);
  for (std::size_t k = 0; k < traj.maps.size(); ++k) {
    const auto P = build_p_lambda(traj.maps[k], inverses[k], 1.0, inversion.interp);
    for (const auto& v : samples) {
      parts.push_back({l2_inner(v, v), -l2_inner(apply_p_principal(P, v), v), sobolev_inner(v, v, 1.0)});
    }
  }
  auto range_at = [&](double lambda) {
    QuotientRange r{INFINITY, -INFINITY};
    for (const auto& p : parts) {
      const double q = (lambda * p.a + p.b) / p.c;
      r.min = std::min(r.min, q);
      r.max = std::max(r.max, q);
    }
    return r;
  };
  LambdaSearch out;
  for (out.lambda = 1.0;; out.lambda *= 2.0, ++out.doublings) {
    out.range = range_at(out.lambda);
    if (out.range.min >= target) {
      out.converged = true;
      break;
    }
    if (out.lambda >= 65536.0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integral identity

IdentityCheck verify_integral_identity(const GeodesicTrajectory& traj, double lambda, int stride, int min_samples) {
  if (stride < 1) throw Error(ErrorKind::InvalidArgument, "stride must be positive");
  const std::size_t count = traj.maps.size();
  if (count < 2 || (count - 1) % static_cast<std::size_t>(stride) != 0) {
    throw Error(ErrorKind::InvalidArgument, "stride must divide the number of checkpoint intervals");
  }
  const std::size_t used = (count - 1) / stride + 1;
  if (static_cast<int>(used) < min_samples) {
    std::ostringstream msg;
    msg << used << " checkpoints are too few for the time quadrature (need " << min_samples << ")";
    throw Error(ErrorKind::TooFewCheckpoints, msg.str());
  }
  if (traj.velocities.size() != count) throw Error(ErrorKind::InvalidArgument, "trajectory lacks velocities");
  const auto& g = traj.maps.front().grid();
  const int d = g.dim();
  const double h = stride * (traj.times[1] - traj.times[0]);
  const auto w = simpson_weights(used, h);
  NodeVectors principal(d, RealArray::Zero(g.size()));
  NodeVectors lower(d, RealArray::Zero(g.size()));
  for (std::size_t s = 0; s < used; ++s) {
    const std::size_t k = s * stride;
    const DiffeoMap& gamma = traj.maps[k];
    const VectorField& v = traj.velocities[k];
    // (P_λ v)∘γ = λ v∘γ − Σ (Dγ·Dγᵀ)_ij (∂_i∂_j v)∘γ, since p∘γ = Dγ·Dγᵀ.
    NodeVectors vg = node_values(pullback(v, gamma));
    NodeVectors pv(d);
    for (int c = 0; c < d; ++c) {
      RealArray acc = RealArray::Zero(g.size());
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          RealArray pij = RealArray::Zero(g.size());
          for (int m = 0; m < d; ++m) pij += gamma.jacobian(i, m).values() * gamma.jacobian(j, m).values();
          const RealArray dv = pullback(second_derivative(v[c], i, j), gamma).values();
          acc += (i == j ? 1.0 : 2.0) * pij * dv;
        }
      pv[c] = lambda * vg[c] - acc;
    }
    const NodeVectors a = solve_jacobian(gamma, pv);
    const NodeVectors b = solve_jacobian(gamma, vg);
    for (int c = 0; c < d; ++c) {
      principal[c] += w[s] * a[c];
      lower[c] += w[s] * b[c];
    }
  }
  const DiffeoMap& eta = traj.maps[(used - 1) * stride];
  const VectorField term = to_field(g, apply_jacobian(eta, principal));
  const VectorField G = lambda * to_field(g, apply_jacobian(eta, lower));
  const VectorField lhs = laplacian(eta.displacement());
  const VectorField rhs = G - term;
  IdentityCheck out;
  out.samples = static_cast<int>(used);
  out.lhs_norm = lhs.l2_norm();
  out.rhs_norm = rhs.l2_norm();
  // When Δη vanishes the two right-hand terms cancel, and their size is the meaningful scale.
  const double scale = std::max({out.lhs_norm, term.l2_norm(), G.l2_norm(), 1e-14});
  out.residual = (lhs - rhs).l2_norm() / scale;
  return out;
}

// ---------------------------------------------------------------------------
// M

MOperator::MOperator(const GeodesicTrajectory& traj, const MetricConfig& config, double lambda,
                     InversionOptions inversion)
    : inertia_(config.inertia), interp_(inversion.interp), maps_(traj.maps) {
  validate(config);
  if (maps_.size() < 2) throw Error(ErrorKind::TooFewCheckpoints, "M needs at least two checkpoints");
  incompressible_ = config.family != MetricFamily::hr_compressible;
  inverses_ = invert_all(maps_, inversion);
  for (std::size_t k = 0; k < maps_.size(); ++k) {
    ops_.push_back(build_p_lambda(maps_[k], inverses_[k], lambda, interp_));
  }
  weights_ = simpson_weights(maps_.size(), traj.times[1] - traj.times[0]);
}

VectorField MOperator::apply_at(std::size_t k, const VectorField& v) const {
  const DiffeoMap& gamma = maps_[k];
  const DiffeoMap& inverse = inverses_[k];
  const auto& g = gamma.grid();
  if (incompressible_) {
    VectorField z = without_mean(pullback(v, inverse, interp_));
    z = fractional_laplacian(z, -0.5);
    z = without_mean(apply_p_lambda(ops_[k], z));
    z = fractional_laplacian(z, -0.5);
    return pullback(z, gamma, interp_);
  }
  // (Ad⁻¹_γ)^{*r} v = A^{−r}[((det Dγ·Dγᵀ)⁻¹ A^r v)∘γ⁻¹].
  const RealArray det = gamma.determinant();
  NodeVectors m = solve_jacobian(gamma, node_values(apply_inertia(v, inertia_)), true);
  for (auto& c : m) c /= det;
  VectorField w = solve_inertia(pullback(to_field(g, m), inverse, interp_), inertia_);
  w = inertia_power(w, inertia_, 0.5);
  w = inertia_power(apply_p_lambda(ops_[k], w), inertia_, -0.5);
  // Ad⁻¹_γ w = Dγ⁻¹(w∘γ).
  return to_field(g, solve_jacobian(gamma, node_values(pullback(w, gamma, interp_))));
}

VectorField MOperator::apply(const VectorField& v) const {
  require_same_grid(v.grid(), grid(), "MOperator::apply");
  if (incompressible_) {
    for (const auto& c : v.data()) require_zero_mean(c, "MOperator::apply");
  }
  VectorField acc(grid(), v.components());
  for (std::size_t k = 0; k < maps_.size(); ++k) acc += weights_[k] * apply_at(k, v);
  return acc;
}

VectorField apply_m_operator(const VectorField& v, const GeodesicTrajectory& traj, const MetricConfig& config,
                             double lambda) {
  return MOperator(traj, config, lambda).apply(v);
}

double m_coercivity(const MOperator& M, const ScanOptions& scan) {
  require_samples(scan);
  const double r = M.inertia().order_r;
  double lo = INFINITY;
  for (int i = 0; i < scan.samples; ++i) {
    const VectorField v = sample(M.grid(), scan, i);
    const VectorField mv = M.apply(v);
    const double q = M.incompressible() ? l2_inner(mv, v) / l2_inner(v, v)
                                        : sobolev_inner(mv, v, r) / sobolev_inner(v, v, r + 1.0);
    lo = std::min(lo, q);
  }
  return lo;
}

double m_coercivity(const GeodesicTrajectory& traj, const MetricConfig& config, double lambda,
                    const ScanOptions& scan) {
  return m_coercivity(MOperator(traj, config, lambda), scan);
}

// ---------------------------------------------------------------------------
// Conservation laws

std::vector<ResidualRow> conservation_residuals(const GeodesicTrajectory& traj, InterpolationOptions interp) {
  std::vector<ResidualRow> rows;
  if (traj.maps.empty()) return rows;
  const auto& u0 = traj.velocities.front();
  const auto mean0 = u0.mean();
  auto add = [&](const std::string& law, std::size_t k, double r) { rows.push_back({law, k, traj.times[k], r}); };
  auto drift = [&](const VectorField& u) {
    const auto m = u.mean();
    double out = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) out = std::max(out, std::abs(m[a] - mean0[a]));
    return out;
  };
  const auto& cfg = traj.config;
  for (std::size_t k = 0; k < traj.maps.size(); ++k) {
    const auto& u = traj.velocities[k];
    const auto& gamma = traj.maps[k];
    switch (cfg.family) {
      case MetricFamily::l2_incompressible_2d:
        add("vorticity_transport", k, transport_residual(rot(u), gamma, rot(u0), interp));
        add("harmonic_drift", k, drift(u));
        add("volume_defect", k, volume_defect(gamma));
        break;
      case MetricFamily::hr_incompressible_2d:
        add("rot_inertia_transport", k,
            transport_residual(rot(apply_inertia(u, cfg.inertia)), gamma, rot(apply_inertia(u0, cfg.inertia)), interp));
        add("harmonic_drift", k, drift(u));
        add("volume_defect", k, volume_defect(gamma));
        break;
      case MetricFamily::hr_compressible:
        add("coadjoint_momentum", k, momentum_residual(u, gamma, u0, cfg.inertia, interp));
        break;
      case MetricFamily::axisym_swirlfree_3d:
        add("phi_transport", k, transport_residual(rot(u), gamma, rot(u0), interp));
        add("swirl", k, swirl(axisym_lift_velocity(u, cfg.killing_axis), cfg.killing_axis));
        add("harmonic_drift", k, drift(u));
        add("volume_defect", k, volume_defect(gamma));
        break;
      case MetricFamily::symplectic_2k: {
        add("symplectic_transport", k, transport_residual(symplectic_scalar(u), gamma, symplectic_scalar(u0), interp));
        add("laplacian_adjoint", k, laplacian_adjoint_residual(u, gamma, u0, interp));
        // Dγᵀ J Dγ = J.
        const int d = gamma.dim();
        double worst = 0.0;
        for (Index p = 0; p < gamma.grid().size(); ++p) {
          const SmallMatrix m = jacobian_at(gamma, p);
          SmallMatrix J = SmallMatrix::Zero(d, d);
          for (int q = 0; q < d / 2; ++q) {
            J(2 * q, 2 * q + 1) = -1.0;
            J(2 * q + 1, 2 * q) = 1.0;
          }
          worst = std::max(worst, (m.transpose() * J * m - J).cwiseAbs().maxCoeff());
        }
        add("symplectic_jacobian", k, worst);
        add("harmonic_drift", k, drift(u));
        add("volume_defect", k, volume_defect(gamma));
        break;
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Spectral regularity

std::vector<Shell> shell_energies(const VectorField& u) {
  const auto& g = u.grid();
  const RealArray& k2 = g.wavenumber_sq();
  std::map<int, Shell> shells;
  for (Index p = 0; p < g.size(); ++p) {
    const int r = static_cast<int>(std::lround(std::sqrt(k2[p])));
    auto& s = shells[r];
    s.radius = r;
    ++s.modes;
    for (const auto& c : u.data()) s.energy += g.volume() * std::norm(c.spectral()[p]);
  }
  std::vector<Shell> out;
  for (const auto& [r, s] : shells) out.push_back(s);
  return out;
}

std::optional<double> decay_slope(const std::vector<Shell>& shells, int max_radius) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (const auto& s : shells) {
    if (s.radius < 1 || s.radius > max_radius || !(s.energy > 1e-24)) continue;
    const double x = std::log(static_cast<double>(s.radius));
    const double y = std::log(s.energy / s.modes);
    const double w = s.modes;
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
    ++used;
  }
  const double den = sw * sxx - sx * sx;
  if (used < 2 || !(den > 0.0)) return std::nullopt;
  return (sw * sxy - sx * sy) / den;
}

RegularityReport regularity_report(const VectorField& u, const std::vector<double>& s_values) {
  if (u.max_abs() == 0.0) throw Error(ErrorKind::ZeroField, "regularity report of the zero field");
  RegularityReport rep;
  for (double s : s_values) rep.sobolev_table.emplace_back(s, sobolev_norm(u, s));
  rep.shells = shell_energies(u);
  if (const auto slope = decay_slope(rep.shells, (u.grid().n() - 1) / 2)) {
    rep.decay_slope = *slope;
    rep.slope_defined = true;
  }
  return rep;
}

}  // namespace torusflow
