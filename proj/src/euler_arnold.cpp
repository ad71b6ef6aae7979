// SPDX-License-Identifier: Apache-2.0
#include "torusflow/euler_arnold.hpp"

#include "torusflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

namespace torusflow {

namespace {

const Complex kI(0.0, 1.0);

struct Schedule {
  long steps_per_checkpoint = 0;
  int checkpoints = 0;
};

Schedule make_schedule(const IntegrationOptions& o) {
  validate(o);
  const double interval = o.T / (o.checkpoints - 1);
  const long steps = std::lround(interval / o.dt);
  if (steps < 1 || std::abs(steps * o.dt - interval) > 1e-9 * interval) {
    std::ostringstream msg;
    msg << "checkpoint interval " << interval << " is not a multiple of dt " << o.dt;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  return {steps, o.checkpoints};
}

double relative_or_absolute(double num, double den) { return den > 0.0 ? num / den : num; }

RealArray odd_k2(const TorusGrid& g) {
  RealArray k2 = RealArray::Zero(g.size());
  for (int a = 0; a < g.dim(); ++a) k2 += g.odd_wavenumbers(a).square();
  return k2;
}

// ψ̂ = S·q̂ with S = −1/(|k̃|²·a(k)); zero where |k̃| vanishes.
RealArray stream_symbol(const TorusGrid& g, const InertiaSpec& inertia) {
  const RealArray k2 = odd_k2(g);
  const RealArray a = inertia_symbol(g, inertia, 1.0);
  return (k2 > 0.5).select(-1.0 / (k2 * a), 0.0);
}

// Velocity J∇ψ + mean for ψ̂ = S q̂, as fields.
VectorField velocity_from_stream(const TorusGrid& g, const ComplexArray& q, const RealArray& S,
                                 const std::vector<double>& mean) {
  const ComplexArray psi = q * S.cast<Complex>();
  std::vector<ScalarField> c;
  for (int p = 0; p < g.dim() / 2; ++p) {
    ComplexArray ue = -kI * g.odd_wavenumbers(2 * p + 1).cast<Complex>() * psi;
    ComplexArray uo = kI * g.odd_wavenumbers(2 * p).cast<Complex>() * psi;
    ue[0] = mean[2 * p];
    uo[0] = mean[2 * p + 1];
    c.push_back(ScalarField::from_symmetric_spectral(g, std::move(ue)));
    c.push_back(ScalarField::from_symmetric_spectral(g, std::move(uo)));
  }
  return VectorField(std::move(c));
}

// RK4 for a scalar q transported by u = J∇(S q) + h, together with the flow displacement.
class TransportStepper {
 public:
  TransportStepper(const TorusGrid& g, RealArray S, std::vector<double> mean, ComplexArray q0,
                   InterpolationOptions interp)
      : g_(g), S_(std::move(S)), h_(std::move(mean)), interp_(interp), q_(std::move(q0)) {
    validate(interp_);
    const int d = g_.dim();
    const RealArray& mask = g_.dealias_mask();
    const double outside = (q_ * (1.0 - mask).cast<Complex>()).abs().maxCoeff();
    const double scale = q_.abs().maxCoeff();
    in_band_ = outside <= 1e-13 * scale;
    // Roundoff outside the band would otherwise be carried undealiased forever.
    if (in_band_) q_ *= mask.cast<Complex>();
    d_.assign(d, RealArray::Zero(g_.size()));
    x_ = grid_points(g_);
    if (interp_.scheme == InterpolationScheme::bspline) prefilter_ = bspline_prefilter(g_, interp_.degree);
    for (int p = 0; p < d / 2; ++p) {
      const ComplexArray ke = g_.odd_wavenumbers(2 * p).cast<Complex>();
      const ComplexArray ko = g_.odd_wavenumbers(2 * p + 1).cast<Complex>();
      vel_.push_back(-(ke + kI * ko) * S_.cast<Complex>());
      grad_.push_back(kI * ke - ko);
    }
  }

  void step(double dt) {
    const int d = g_.dim();
    ComplexArray kq[4];
    std::vector<RealArray> kd[4];
    ComplexArray qs = q_;
    std::vector<RealArray> ds = d_;
    const double c[4] = {0.0, 0.5, 0.5, 1.0};
    for (int s = 0; s < 4; ++s) {
      if (s > 0) {
        qs = q_ + (c[s] * dt) * kq[s - 1];
        for (int a = 0; a < d; ++a) ds[a] = d_[a] + (c[s] * dt) * kd[s - 1][a];
      }
      double speed = 0.0;
      rhs(qs, ds, kq[s], kd[s], speed);
      if (s == 0) check_cfl(speed, g_, dt);
    }
    q_ += (dt / 6.0) * (kq[0] + 2.0 * kq[1] + 2.0 * kq[2] + kq[3]);
    for (int a = 0; a < d; ++a) d_[a] += (dt / 6.0) * (kd[0][a] + 2.0 * kd[1][a] + 2.0 * kd[2][a] + kd[3][a]);
  }

  const ComplexArray& q() const { return q_; }
  ScalarField scalar() const { return ScalarField::from_symmetric_spectral(g_, q_); }
  VectorField velocity() const { return velocity_from_stream(g_, q_, S_, h_); }
  DiffeoMap map() const {
    std::vector<ScalarField> c;
    for (const auto& a : d_) c.emplace_back(g_, a);
    return DiffeoMap(VectorField(std::move(c)));
  }

 private:
  // Inverse transform of a packed pair: real part to `re`, imaginary part to `im`.
  void unpack(const ComplexArray& z, RealArray& re, RealArray& im) {
    g_.inverse(z, work_);
    re = work_.real();
    im = work_.imag();
  }

  void rhs(const ComplexArray& q, const std::vector<RealArray>& d, ComplexArray& dq, std::vector<RealArray>& dd,
           double& speed) {
    const int dim = g_.dim();
    const RealArray& mask = g_.dealias_mask();
    std::vector<RealArray> u(dim), grad(dim);
    const ComplexArray qm = in_band_ ? q : ComplexArray(q * mask.cast<Complex>());
    for (int p = 0; p < dim / 2; ++p) {
      unpack(vel_[p] * qm, u[2 * p], u[2 * p + 1]);
      unpack(grad_[p] * qm, grad[2 * p], grad[2 * p + 1]);
    }
    RealArray prod = RealArray::Zero(g_.size());
    RealArray speed2 = RealArray::Zero(g_.size());
    for (int a = 0; a < dim; ++a) {
      u[a] += h_[a];
      prod += u[a] * grad[a];
      speed2 += u[a].square();
    }
    speed = std::sqrt(speed2.maxCoeff());
    g_.forward(prod, dq);
    dq *= -mask.cast<Complex>();

    PointSet pts = x_;
    for (int a = 0; a < dim; ++a) pts.row(a) += d[a].matrix().transpose();
    Eigen::MatrixXd vals;
    if (interp_.scheme == InterpolationScheme::bspline) {
      std::vector<RealArray> coeffs(dim);
      for (int p = 0; p < dim / 2; ++p) {
        unpack(vel_[p] * q * prefilter_.cast<Complex>(), coeffs[2 * p], coeffs[2 * p + 1]);
      }
      for (int a = 0; a < dim; ++a) coeffs[a] += h_[a];
      vals = Interpolant::from_coefficients(g_, std::move(coeffs), interp_.degree).evaluate(pts);
    } else {
      vals = Interpolant(velocity_from_stream(g_, q, S_, h_), interp_).evaluate(pts);
    }
    dd.resize(dim);
    for (int a = 0; a < dim; ++a) dd[a] = vals.row(a).transpose().array();
  }

  TorusGrid g_;
  RealArray S_;
  std::vector<double> h_;
  InterpolationOptions interp_;
  ComplexArray q_;
  std::vector<RealArray> d_;
  PointSet x_;
  RealArray prefilter_;
  std::vector<ComplexArray> vel_, grad_;
  ComplexArray work_;
  bool in_band_ = true;
};

using CheckpointDiagnostics =
    std::function<std::vector<double>(const ScalarField& q, const VectorField& u, const DiffeoMap& gamma)>;

GeodesicTrajectory run_transport(const TorusGrid& g, const ComplexArray& q0, RealArray S, std::vector<double> mean,
                                 const IntegrationOptions& opts, const MetricConfig& config,
                                 std::vector<std::string> names, const CheckpointDiagnostics& diag) {
  const Schedule sched = make_schedule(opts);
  TransportStepper stepper(g, std::move(S), std::move(mean), q0, opts.interp);
  GeodesicTrajectory traj;
  traj.config = config;
  traj.dt = opts.dt;
  if (opts.diagnostics) traj.diagnostic_names = std::move(names);
  long step = 0;
  for (int k = 0; k < sched.checkpoints; ++k) {
    if (k > 0) {
      for (long s = 0; s < sched.steps_per_checkpoint; ++s, ++step) stepper.step(opts.dt);
    }
    const bool keep = opts.diagnostics || k == 0 || k == sched.checkpoints - 1;
    if (!keep) continue;
    traj.times.push_back(step * opts.dt);
    traj.maps.push_back(stepper.map());
    traj.velocities.push_back(stepper.velocity());
    traj.transported.push_back(stepper.scalar());
    if (opts.diagnostics) traj.diagnostics.push_back(diag(traj.transported.back(), traj.velocities.back(), traj.maps.back()));
  }
  return traj;
}

double harmonic_drift(const VectorField& u, const std::vector<double>& h) {
  double drift = 0.0;
  for (int a = 0; a < u.components(); ++a) drift = std::max(drift, std::abs(u[a].mean() - h[a]));
  return drift;
}

}  // namespace

void validate(const IntegrationOptions& o) {
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(o.T > 0.0) || !std::isfinite(o.T)) throw Error(ErrorKind::InvalidArgument, "horizon T must be positive");
  if (o.checkpoints < 2) throw Error(ErrorKind::InvalidArgument, "need at least two checkpoints");
  validate(o.interp);
}

double GeodesicTrajectory::diagnostic(std::size_t checkpoint, const std::string& name) const {
  const auto it = std::find(diagnostic_names.begin(), diagnostic_names.end(), name);
  if (it == diagnostic_names.end()) throw Error(ErrorKind::InvalidArgument, "no diagnostic named " + name);
  return diagnostics.at(checkpoint).at(static_cast<std::size_t>(it - diagnostic_names.begin()));
}

double GeodesicTrajectory::max_diagnostic(const std::string& name) const {
  double m = -INFINITY;
  for (std::size_t k = 0; k < diagnostics.size(); ++k) m = std::max(m, diagnostic(k, name));
  return m;
}

double metric_energy(const VectorField& u, const InertiaSpec& inertia) {
  if (inertia.is_identity()) return l2_inner(u, u);
  return l2_inner(apply_inertia(u, inertia), u);
}

double transport_residual(const ScalarField& q, const DiffeoMap& gamma, const ScalarField& q0,
                          InterpolationOptions opts) {
  const ScalarField moved = pullback(q, gamma, opts);
  return relative_or_absolute((moved - q0).l2_norm(), q0.l2_norm());
}

double laplacian_adjoint_residual(const VectorField& u, const DiffeoMap& gamma, const VectorField& u0,
                                  InterpolationOptions opts) {
  const int d = gamma.dim();
  const VectorField lu = pullback(laplacian(u), gamma, opts);
  const VectorField lu0 = laplacian(u0);
  double num = 0.0;
  for (int i = 0; i < d; ++i) {
    RealArray rhs = RealArray::Zero(gamma.grid().size());
    for (int j = 0; j < d; ++j) rhs += gamma.jacobian(i, j).values() * lu0[j].values();
    num += (lu[i].values() - rhs).square().sum();
  }
  num = std::sqrt(gamma.grid().cell_volume() * num);
  return relative_or_absolute(num, lu0.l2_norm());
}

double momentum_residual(const VectorField& u, const DiffeoMap& gamma, const VectorField& u0,
                         const InertiaSpec& inertia, InterpolationOptions opts) {
  const int d = gamma.dim();
  const VectorField m = apply_inertia(u, inertia);
  const VectorField m0 = apply_inertia(u0, inertia);
  const VectorField mg = pullback(m, gamma, opts);
  const RealArray det = gamma.determinant();
  double num = 0.0;
  for (int i = 0; i < d; ++i) {
    RealArray lhs = RealArray::Zero(gamma.grid().size());
    for (int j = 0; j < d; ++j) lhs += gamma.jacobian(j, i).values() * mg[j].values();
    num += (det * lhs - m0[i].values()).square().sum();
  }
  num = std::sqrt(gamma.grid().cell_volume() * num);
  return relative_or_absolute(num, m0.l2_norm());
}

VectorField velocity_from_vorticity(const ScalarField& omega, const std::vector<double>& mean) {
  const auto& g = omega.grid();
  if (g.dim() != 2) throw Error(ErrorKind::WrongDimension, "velocity_from_vorticity needs a 2D grid");
  if (mean.size() != 2) throw Error(ErrorKind::InvalidArgument, "mean velocity needs two entries");
  require_zero_mean(omega, "velocity_from_vorticity");
  return velocity_from_stream(g, omega.spectral(), stream_symbol(g, InertiaSpec{}), mean);
}

ScalarField euler2d_rhs(const ScalarField& omega, const std::vector<double>& mean) {
  const VectorField u = velocity_from_vorticity(omega, mean);
  ScalarField acc(omega.grid());
  for (int a = 0; a < 2; ++a) acc += dealiased_product(u[a], derivative(omega, a));
  return -1.0 * acc;
}

void validate_divergence_free(const VectorField& u) {
  const auto& g = u.grid();
  const double div = sobolev_norm(divergence(u), 0.0);
  double grad2 = 0.0;
  for (int a = 0; a < u.components(); ++a) grad2 += g.volume() * (g.wavenumber_sq() * u[a].spectral().abs2()).sum();
  // The second term absorbs roundoff on (nearly) constant fields.
  if (div > 1e-10 * std::sqrt(grad2) + 1e-14 * u.l2_norm()) {
    std::ostringstream msg;
    msg << "divergence norm " << div << " relative to gradient norm " << std::sqrt(grad2);
    throw Error(ErrorKind::NotDivergenceFree, msg.str());
  }
}

GeodesicTrajectory integrate_euler2d(const ScalarField& omega0, const std::vector<double>& mean,
                                     const IntegrationOptions& opts) {
  const auto& g = omega0.grid();
  if (g.dim() != 2) throw Error(ErrorKind::WrongDimension, "integrate_euler2d needs a 2D grid");
  if (mean.size() != 2) throw Error(ErrorKind::InvalidArgument, "mean velocity needs two entries");
  require_zero_mean(omega0, "integrate_euler2d");
  MetricConfig config;
  config.family = MetricFamily::l2_incompressible_2d;
  const ScalarField w0 = omega0;
  const auto interp = opts.interp;
  return run_transport(g, omega0.spectral(), stream_symbol(g, InertiaSpec{}), mean, opts, config,
                       {"energy", "enstrophy", "vorticity_transport", "harmonic_drift", "volume_defect"},
                       [=](const ScalarField& w, const VectorField& u, const DiffeoMap& gamma) {
                         return std::vector<double>{metric_energy(u, InertiaSpec{}), l2_inner(w, w),
                                                    transport_residual(w, gamma, w0, interp),
                                                    harmonic_drift(u, mean), volume_defect(gamma)};
                       });
}

GeodesicTrajectory integrate_higher_order_2d(const VectorField& u0, const InertiaSpec& inertia,
                                             const IntegrationOptions& opts) {
  const auto& g = u0.grid();
  if (g.dim() != 2 || u0.components() != 2) throw Error(ErrorKind::WrongDimension, "needs a 2D velocity");
  validate(inertia);
  validate_divergence_free(u0);
  const ScalarField q0 = rot(apply_inertia(u0, inertia));
  require_zero_mean(q0, "integrate_higher_order_2d");
  MetricConfig config;
  config.family = inertia.is_identity() ? MetricFamily::l2_incompressible_2d : MetricFamily::hr_incompressible_2d;
  config.inertia = inertia;
  const auto mean = u0.mean();
  const auto interp = opts.interp;
  return run_transport(g, q0.spectral(), stream_symbol(g, inertia), mean, opts, config,
                       {"energy", "q_enstrophy", "rot_inertia_transport", "harmonic_drift", "volume_defect"},
                       [=](const ScalarField& q, const VectorField& u, const DiffeoMap& gamma) {
                         return std::vector<double>{metric_energy(u, inertia), l2_inner(q, q),
                                                    transport_residual(q, gamma, q0, interp),
                                                    harmonic_drift(u, mean), volume_defect(gamma)};
                       });
}

// ---------------------------------------------------------------------------
// Compressible family

double burgers_blowup_time(const ScalarField& u0) {
  if (u0.grid().dim() != 1) throw Error(ErrorKind::WrongDimension, "blowup time is defined for one-dimensional data");
  const double slope = derivative(u0, 0).values().minCoeff();
  if (slope >= 0.0) return INFINITY;
  return -1.0 / (3.0 * slope);
}

namespace {

class CompressibleStepper {
 public:
  CompressibleStepper(const VectorField& u0, const InertiaSpec& inertia, InterpolationOptions interp)
      : g_(u0.grid()), inertia_(inertia), interp_(interp), m0_(apply_inertia(u0, inertia)),
        d_(g_.dim(), RealArray::Zero(g_.size())), inverse_(identity_map(g_)) {
    inv_opts_.interp = interp_;
  }

  void step(double dt) {
    const int dim = g_.dim();
    std::vector<RealArray> k[4];
    std::vector<RealArray> ds = d_;
    const double c[4] = {0.0, 0.5, 0.5, 1.0};
    for (int s = 0; s < 4; ++s) {
      if (s > 0) {
        for (int a = 0; a < dim; ++a) ds[a] = d_[a] + (c[s] * dt) * k[s - 1][a];
      }
      k[s] = rate(ds);
      if (s == 0) {
        RealArray sp = RealArray::Zero(g_.size());
        for (const auto& v : k[s]) sp += v.square();
        check_cfl(std::sqrt(sp.maxCoeff()), g_, dt);
      }
    }
    for (int a = 0; a < dim; ++a) d_[a] += (dt / 6.0) * (k[0][a] + 2.0 * k[1][a] + 2.0 * k[2][a] + k[3][a]);
  }

  DiffeoMap map() const { return DiffeoMap(displacement(d_)); }

  /// Eulerian velocity of the current state.
  VectorField velocity() {
    const DiffeoMap gamma = map();
    const VectorField w = lagrangian_momentum(gamma);
    inverse_ = invert_map(gamma, inv_opts_, &inverse_);
    const VectorField m = pullback(w, inverse_, interp_);
    return solve_inertia(m, inertia_);
  }

 private:
  VectorField displacement(const std::vector<RealArray>& d) const {
    std::vector<ScalarField> c;
    for (const auto& a : d) c.emplace_back(g_, a);
    return VectorField(std::move(c));
  }

  // (det Dγ·Dγᵀ)⁻¹ m₀ at the nodes, which equals (A^r u)∘γ.
  VectorField lagrangian_momentum(const DiffeoMap& gamma) const {
    const RealArray det = gamma.determinant();
    if (!(det.minCoeff() > 0.0)) throw Error(ErrorKind::NonInvertible, "flow map lost orientation");
    if (g_.dim() == 1) return VectorField{ScalarField(g_, m0_[0].values() / det.square())};
    const RealArray& j00 = gamma.jacobian(0, 0).values();
    const RealArray& j01 = gamma.jacobian(0, 1).values();
    const RealArray& j10 = gamma.jacobian(1, 0).values();
    const RealArray& j11 = gamma.jacobian(1, 1).values();
    const RealArray& a = m0_[0].values();
    const RealArray& b = m0_[1].values();
    const RealArray inv = 1.0 / det.square();
    return VectorField{ScalarField(g_, (j11 * a - j10 * b) * inv), ScalarField(g_, (j00 * b - j01 * a) * inv)};
  }

  std::vector<RealArray> rate(const std::vector<RealArray>& d) {
    const DiffeoMap gamma(displacement(d));
    const VectorField w = lagrangian_momentum(gamma);
    std::vector<RealArray> out;
    if (inertia_.is_identity()) {
      for (const auto& c : w.data()) out.push_back(c.values());
      return out;
    }
    inverse_ = invert_map(gamma, inv_opts_, &inverse_);
    const VectorField u = solve_inertia(pullback(w, inverse_, interp_), inertia_);
    return Interpolant(u, interp_).evaluate_displaced(gamma.displacement());
  }

  TorusGrid g_;
  InertiaSpec inertia_;
  InterpolationOptions interp_;
  InversionOptions inv_opts_;
  VectorField m0_;
  std::vector<RealArray> d_;
  DiffeoMap inverse_;
};

}  // namespace

GeodesicTrajectory integrate_epdiff_lagrangian(const VectorField& u0, const InertiaSpec& inertia,
                                               const IntegrationOptions& opts) {
  const auto& g = u0.grid();
  const int n = g.dim();
  if (n != 1 && n != 2) throw Error(ErrorKind::WrongDimension, "compressible family needs a 1D or 2D grid");
  if (u0.components() != n) throw Error(ErrorKind::WrongDimension, "velocity needs dim components");
  validate(inertia);
  if (inertia.is_identity()) {
    if (n != 1) throw Error(ErrorKind::InvalidArgument, "inertia order 0 is only allowed in one dimension");
    const double tb = burgers_blowup_time(u0[0]);
    if (opts.T > 0.5 * tb * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "horizon " << opts.T << " exceeds half the blowup time " << tb;
      throw Error(ErrorKind::InvalidArgument, msg.str());
    }
  }
  const Schedule sched = make_schedule(opts);
  MetricConfig config;
  config.family = MetricFamily::hr_compressible;
  config.inertia = inertia;
  config.space_dim = n;
  GeodesicTrajectory traj;
  traj.config = config;
  traj.dt = opts.dt;
  if (opts.diagnostics) traj.diagnostic_names = {"energy", "coadjoint_momentum", "min_jacobian_det"};
  CompressibleStepper stepper(u0, inertia, opts.interp);
  long step = 0;
  for (int k = 0; k < sched.checkpoints; ++k) {
    if (k > 0) {
      for (long s = 0; s < sched.steps_per_checkpoint; ++s, ++step) stepper.step(opts.dt);
    }
    const bool keep = opts.diagnostics || k == 0 || k == sched.checkpoints - 1;
    if (!keep) continue;
    traj.times.push_back(step * opts.dt);
    traj.maps.push_back(stepper.map());
    traj.velocities.push_back(k == 0 ? u0 : stepper.velocity());
    if (opts.diagnostics) {
      const auto& u = traj.velocities.back();
      const auto& gamma = traj.maps.back();
      traj.diagnostics.push_back({metric_energy(u, inertia), momentum_residual(u, gamma, u0, inertia, opts.interp),
                                  gamma.determinant().minCoeff()});
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Axisymmetric family

std::array<int, 2> transverse_axes(int killing_axis) {
  if (killing_axis < 0 || killing_axis > 2) throw Error(ErrorKind::InvalidArgument, "killing axis must be 0, 1 or 2");
  return {(killing_axis + 1) % 3, (killing_axis + 2) % 3};
}

double swirl(const VectorField& u, int killing_axis) {
  if (u.grid().dim() != 3 || u.components() != 3) throw Error(ErrorKind::WrongDimension, "swirl needs a 3D field");
  transverse_axes(killing_axis);
  return u[killing_axis].max_abs();
}

ScalarField axisym_phi(const VectorField& u, int killing_axis) {
  if (u.grid().dim() != 3 || u.components() != 3) throw Error(ErrorKind::WrongDimension, "phi needs a 3D field");
  const auto [a1, a2] = transverse_axes(killing_axis);
  // (curl u)·K with K = ∂_axis; the cyclic order of (axis, a1, a2) makes this ∂_{a1}u_{a2} − ∂_{a2}u_{a1}.
  return derivative(u[a2], a1) - derivative(u[a1], a2);
}

AxisymmetricState axisym_reduce(const VectorField& u0, int killing_axis) {
  const auto& g = u0.grid();
  if (g.dim() != 3 || u0.components() != 3) throw Error(ErrorKind::WrongDimension, "axisym_reduce needs a 3D field");
  const auto [a1, a2] = transverse_axes(killing_axis);
  const double scale = u0.max_abs();
  for (int i = 0; i < 3; ++i) {
    const double dk = derivative(u0[i], killing_axis).max_abs();
    if (dk > 1e-10 * std::max(scale, 1e-300)) {
      std::ostringstream msg;
      msg << "component " << i << " varies along the Killing axis (max derivative " << dk << ")";
      throw Error(ErrorKind::NotAxisymmetric, msg.str());
    }
  }
  if (u0[killing_axis].max_abs() > 1e-10 * std::max(scale, 1e-300) && u0[killing_axis].max_abs() > 0.0) {
    std::ostringstream msg;
    msg << "swirl component has magnitude " << u0[killing_axis].max_abs();
    throw Error(ErrorKind::NonZeroSwirl, msg.str());
  }
  const TorusGrid plane(2, g.n());
  std::vector<ScalarField> planar;
  for (int comp : {a1, a2}) {
    RealArray v(plane.size());
    for (Index p = 0; p < plane.size(); ++p) {
      std::array<int, kMaxDim> idx{};
      idx[a1] = static_cast<int>(p / plane.n());
      idx[a2] = static_cast<int>(p % plane.n());
      v[p] = u0[comp].values()[g.flat_index(idx)];
    }
    planar.emplace_back(plane, std::move(v));
  }
  VectorField pv(std::move(planar));
  validate_divergence_free(pv);
  return {killing_axis, g.n(), std::move(pv)};
}

ScalarField axisym_lift_scalar(const ScalarField& planar, int killing_axis) {
  const auto& pg = planar.grid();
  if (pg.dim() != 2) throw Error(ErrorKind::WrongDimension, "lift needs a planar field");
  const auto [a1, a2] = transverse_axes(killing_axis);
  const TorusGrid g(3, pg.n());
  RealArray v(g.size());
  ComplexArray s = ComplexArray::Zero(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    const auto idx = g.multi_index(p);
    const Index q = idx[a1] * pg.n() + idx[a2];
    v[p] = planar.values()[q];
    // An x_K-independent field has spectrum only on the k_K = 0 plane.
    if (idx[killing_axis] == 0) s[p] = planar.spectral()[q];
  }
  return ScalarField::from_parts(g, std::move(v), std::move(s));
}

VectorField axisym_lift_velocity(const VectorField& planar, int killing_axis) {
  const auto [a1, a2] = transverse_axes(killing_axis);
  const TorusGrid g(3, planar.grid().n());
  std::vector<ScalarField> c(3, ScalarField(g));
  c[a1] = axisym_lift_scalar(planar[0], killing_axis);
  c[a2] = axisym_lift_scalar(planar[1], killing_axis);
  return VectorField(std::move(c));
}

DiffeoMap axisym_lift_map(const DiffeoMap& planar, int killing_axis) {
  return DiffeoMap(axisym_lift_velocity(planar.displacement(), killing_axis));
}

GeodesicTrajectory axisym_integrate(const AxisymmetricState& state, const IntegrationOptions& opts) {
  const auto& pv = state.planar_velocity;
  const auto& g = pv.grid();
  const ScalarField phi0 = rot(pv);
  const auto mean = pv.mean();
  const auto interp = opts.interp;
  MetricConfig config;
  config.family = MetricFamily::axisym_swirlfree_3d;
  config.killing_axis = state.killing_axis;
  return run_transport(g, phi0.spectral(), stream_symbol(g, InertiaSpec{}), mean, opts, config,
                       {"energy", "phi_transport", "swirl", "harmonic_drift", "volume_defect"},
                       [=](const ScalarField& phi, const VectorField& u, const DiffeoMap& gamma) {
                         // The Killing coordinate contributes a factor 2π to the 3D energy.
                         return std::vector<double>{kTwoPi * metric_energy(u, InertiaSpec{}),
                                                    transport_residual(phi, gamma, phi0, interp), 0.0,
                                                    harmonic_drift(u, mean), volume_defect(gamma)};
                       });
}

// ---------------------------------------------------------------------------
// Symplectic family

ScalarField symplectic_scalar(const VectorField& u) {
  const auto& g = u.grid();
  if (g.dim() % 2 != 0 || u.components() != g.dim()) {
    throw Error(ErrorKind::WrongDimension, "symplectic fields live on even-dimensional tori");
  }
  if (g.dim() == 2) return rot(u);
  // J u = (−u₁, u₀, −u₃, u₂, ...); q = −div(J u).
  ScalarField q(g);
  for (int p = 0; p < g.dim() / 2; ++p) {
    q += derivative(u[2 * p + 1], 2 * p);
    q -= derivative(u[2 * p], 2 * p + 1);
  }
  return q;
}

VectorField velocity_from_symplectic_scalar(const ScalarField& q, const std::vector<double>& mean) {
  const auto& g = q.grid();
  if (g.dim() % 2 != 0) throw Error(ErrorKind::WrongDimension, "symplectic fields live on even-dimensional tori");
  if (static_cast<int>(mean.size()) != g.dim()) throw Error(ErrorKind::InvalidArgument, "mean needs dim entries");
  require_zero_mean(q, "velocity_from_symplectic_scalar");
  return velocity_from_stream(g, q.spectral(), stream_symbol(g, InertiaSpec{}), mean);
}

namespace {

// J v for the blockwise standard symplectic matrix.
VectorField apply_j(const VectorField& v) {
  std::vector<ScalarField> c;
  for (int p = 0; p < v.components() / 2; ++p) {
    c.push_back(-1.0 * v[2 * p + 1]);
    c.push_back(v[2 * p]);
  }
  return VectorField(std::move(c));
}

}  // namespace

void validate_symplectic(const VectorField& u) {
  const auto& g = u.grid();
  if (g.dim() % 2 != 0 || u.components() != g.dim()) {
    throw Error(ErrorKind::WrongDimension, "symplectic fields live on even-dimensional tori");
  }
  // d(ω♭u) = 0 exactly when J u is a gradient plus a constant.
  const auto parts = hodge_decompose(apply_j(u));
  const double bad = parts.divfree_part.l2_norm();
  const double total = (parts.divfree_part + parts.gradient_part).l2_norm();
  if (bad > 1e-10 * total) {
    std::ostringstream msg;
    msg << "non-exact part has relative size " << bad / total;
    throw Error(ErrorKind::NotSymplecticField, msg.str());
  }
}

VectorField project_symplectic(const VectorField& u) {
  const auto parts = hodge_decompose(apply_j(u));
  // J⁻¹ = −J.
  return -1.0 * apply_j(parts.gradient_part) + VectorField::constant(u.grid(), u.mean());
}

GeodesicTrajectory symplectic_integrate(const VectorField& u0, const IntegrationOptions& opts) {
  const auto& g = u0.grid();
  if (g.dim() != 2 && g.dim() != 4) throw Error(ErrorKind::WrongDimension, "symplectic family needs T² or T⁴");
  if (g.dim() == 4 && g.n() > 8) {
    throw Error(ErrorKind::ResolutionTooHigh, "T⁴ symplectic runs are limited to 8 points per axis");
  }
  validate_symplectic(u0);
  const ScalarField q0 = symplectic_scalar(u0);
  const auto mean = u0.mean();
  const auto interp = opts.interp;
  MetricConfig config;
  config.family = MetricFamily::symplectic_2k;
  config.symplectic_k = g.dim() / 2;
  return run_transport(g, q0.spectral(), stream_symbol(g, InertiaSpec{}), mean, opts, config,
                       {"energy", "symplectic_transport", "laplacian_adjoint", "harmonic_drift", "volume_defect"},
                       [=](const ScalarField& q, const VectorField& u, const DiffeoMap& gamma) {
                         return std::vector<double>{metric_energy(u, InertiaSpec{}),
                                                    transport_residual(q, gamma, q0, interp),
                                                    laplacian_adjoint_residual(u, gamma, u0, interp),
                                                    harmonic_drift(u, mean), volume_defect(gamma)};
                       });
}

// ---------------------------------------------------------------------------

void validate_admissible(const VectorField& u0, const MetricConfig& config) {
  validate(config);
  if (u0.grid().dim() != config.grid_dim() || u0.components() != config.grid_dim()) {
    throw Error(ErrorKind::FamilyMismatch, std::string(to_string(config.family)) + " expects fields on a " +
                                               std::to_string(config.grid_dim()) + "D grid");
  }
  switch (config.family) {
    case MetricFamily::l2_incompressible_2d:
    case MetricFamily::hr_incompressible_2d:
      validate_divergence_free(u0);
      break;
    case MetricFamily::axisym_swirlfree_3d:
      axisym_reduce(u0, config.killing_axis);
      break;
    case MetricFamily::symplectic_2k:
      validate_symplectic(u0);
      break;
    case MetricFamily::hr_compressible:
      break;
  }
}

VectorField project_admissible(const VectorField& u0, const MetricConfig& config) {
  switch (config.family) {
    case MetricFamily::l2_incompressible_2d:
    case MetricFamily::hr_incompressible_2d:
      return project_divergence_free(u0);
    case MetricFamily::axisym_swirlfree_3d: {
      const auto& g = u0.grid();
      const int axis = config.killing_axis;
      RealArray keep = (g.wavenumbers(axis) == 0).cast<double>();
      std::vector<ScalarField> c;
      for (int i = 0; i < 3; ++i) c.push_back(i == axis ? ScalarField(g) : apply_symbol(u0[i], keep));
      return project_divergence_free(VectorField(std::move(c)));
    }
    case MetricFamily::symplectic_2k:
      return project_symplectic(u0);
    case MetricFamily::hr_compressible:
      return u0;
  }
  return u0;
}

GeodesicTrajectory integrate_geodesic(const VectorField& u0, const MetricConfig& config,
                                      const IntegrationOptions& opts) {
  validate_admissible(u0, config);
  GeodesicTrajectory traj;
  switch (config.family) {
    case MetricFamily::l2_incompressible_2d:
      traj = integrate_euler2d(rot(u0), u0.mean(), opts);
      break;
    case MetricFamily::hr_incompressible_2d:
      traj = integrate_higher_order_2d(u0, config.inertia, opts);
      break;
    case MetricFamily::hr_compressible:
      traj = integrate_epdiff_lagrangian(u0, config.inertia, opts);
      break;
    case MetricFamily::axisym_swirlfree_3d:
      traj = axisym_integrate(axisym_reduce(u0, config.killing_axis), opts);
      break;
    case MetricFamily::symplectic_2k:
      traj = symplectic_integrate(u0, opts);
      break;
  }
  traj.config = config;
  return traj;
}

}  // namespace torusflow
