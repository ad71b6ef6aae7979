// SPDX-License-Identifier: Apache-2.0
#include "torusflow/diffeo.hpp"

#include "torusflow/error.hpp"
#include "torusflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace torusflow {

std::vector<ScalarField> spectral_jacobian(const VectorField& displacement) {
  const auto& g = displacement.grid();
  const int d = g.dim();
  if (displacement.components() != d) throw Error(ErrorKind::WrongDimension, "displacement needs dim components");
  std::vector<ScalarField> jac;
  jac.reserve(d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ScalarField e = derivative(displacement[i], j);
      if (i == j) e += ScalarField::constant(g, 1.0);
      jac.push_back(std::move(e));
    }
  }
  return jac;
}

RealArray determinant(const std::vector<ScalarField>& m, int dim) {
  const Index size = m.at(0).size();
  RealArray det(size);
  Eigen::MatrixXd a(dim, dim);
  for (Index p = 0; p < size; ++p) {
    if (dim == 1) {
      det[p] = m[0].values()[p];
    } else if (dim == 2) {
      det[p] = m[0].values()[p] * m[3].values()[p] - m[1].values()[p] * m[2].values()[p];
    } else {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = m[i * dim + j].values()[p];
      det[p] = a.determinant();
    }
  }
  return det;
}

DiffeoMap::DiffeoMap(VectorField displacement) : disp_(std::move(displacement)), jac_(spectral_jacobian(disp_)) {}

DiffeoMap::DiffeoMap(VectorField displacement, std::vector<ScalarField> jacobian)
    : disp_(std::move(displacement)), jac_(std::move(jacobian)) {
  const int d = dim();
  if (disp_.components() != d) throw Error(ErrorKind::WrongDimension, "displacement needs dim components");
  if (static_cast<int>(jac_.size()) != d * d) throw Error(ErrorKind::WrongDimension, "jacobian needs dim² entries");
  for (const auto& e : jac_) require_same_grid(disp_.grid(), e.grid(), "DiffeoMap");
}

RealArray DiffeoMap::determinant() const { return torusflow::determinant(jac_, dim()); }

PointSet DiffeoMap::positions() const { return displaced_points(disp_); }

DiffeoMap identity_map(const TorusGrid& grid) { return DiffeoMap(VectorField(grid)); }

DiffeoMap translation_map(const TorusGrid& grid, const std::vector<double>& shift) {
  if (static_cast<int>(shift.size()) != grid.dim()) throw Error(ErrorKind::WrongDimension, "shift needs dim entries");
  return DiffeoMap(VectorField::constant(grid, shift));
}

ScalarField pullback(const ScalarField& f, const DiffeoMap& gamma, InterpolationOptions opts) {
  require_same_grid(f.grid(), gamma.grid(), "pullback");
  auto v = Interpolant(f, opts).evaluate_displaced(gamma.displacement());
  return ScalarField(f.grid(), std::move(v[0]));
}

VectorField pullback(const VectorField& u, const DiffeoMap& gamma, InterpolationOptions opts) {
  require_same_grid(u.grid(), gamma.grid(), "pullback");
  auto v = Interpolant(u, opts).evaluate_displaced(gamma.displacement());
  std::vector<ScalarField> c;
  for (auto& a : v) c.emplace_back(u.grid(), std::move(a));
  return VectorField(std::move(c));
}

DiffeoMap compose(const DiffeoMap& a, const DiffeoMap& b, InterpolationOptions opts) {
  require_same_grid(a.grid(), b.grid(), "compose");
  return DiffeoMap(b.displacement() + pullback(a.displacement(), b, opts));
}

DiffeoMap invert_map(const DiffeoMap& gamma, const InversionOptions& opts, const DiffeoMap* warm_start) {
  const auto& g = gamma.grid();
  const int d = g.dim();
  const double min_det = gamma.determinant().minCoeff();
  if (!(min_det > opts.min_det)) {
    std::ostringstream msg;
    msg << "minimum Jacobian determinant " << min_det << " is below " << opts.min_det;
    throw Error(ErrorKind::NonInvertible, msg.str());
  }
  std::vector<ScalarField> fields = gamma.displacement().data();
  for (const auto& j : gamma.jacobian()) fields.push_back(j);
  const Interpolant interp(fields, opts.interp);
  const PointSet x = grid_points(g);
  PointSet y;
  if (warm_start != nullptr) {
    require_same_grid(g, warm_start->grid(), "invert_map");
    y = warm_start->positions();
  } else {
    y = x;
    for (int a = 0; a < d; ++a) y.row(a) -= gamma.displacement()[a].values().matrix().transpose();
  }
  const Index count = y.cols();
  auto residual = [&](const Eigen::MatrixXd& vals, const PointSet& at) {
    return Eigen::MatrixXd(at + vals.topRows(d) - x);
  };
  Eigen::MatrixXd vals = interp.evaluate(y);
  Eigen::MatrixXd r = residual(vals, y);
  double res = r.cwiseAbs().maxCoeff();
  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
  using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
  for (int it = 0; it <= opts.max_iter; ++it) {
    if (res < opts.tol) {
      std::vector<ScalarField> e;
      for (int a = 0; a < d; ++a) e.emplace_back(g, RealArray((y.row(a) - x.row(a)).transpose().array()));
      return DiffeoMap(VectorField(std::move(e)));
    }
    Eigen::MatrixXd step(d, count);
    Small m(d, d);
    for (Index p = 0; p < count; ++p) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = vals(d + i * d + j, p);
      const SmallVec rp = r.col(p);
      step.col(p) = m.partialPivLu().solve(rp);
    }
    double frac = opts.damping;
    for (int halvings = 0;; ++halvings) {
      const PointSet trial = y - frac * step;
      Eigen::MatrixXd tv = interp.evaluate(trial);
      Eigen::MatrixXd tr = residual(tv, trial);
      const double tres = tr.cwiseAbs().maxCoeff();
      if (tres < res || halvings >= 30) {
        y = trial;
        vals = std::move(tv);
        r = std::move(tr);
        res = tres;
        break;
      }
      frac *= 0.5;
    }
  }
  std::ostringstream msg;
  msg << "map inversion residual " << res << " after " << opts.max_iter << " iterations";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

double volume_defect(const DiffeoMap& gamma) { return (gamma.determinant() - 1.0).abs().maxCoeff(); }

void validate(const FlowIntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  validate(cfg.interp);
}

void check_cfl(double max_speed, const TorusGrid& grid, double dt) {
  if (!(dt * max_speed < 0.5 * grid.spacing())) {
    std::ostringstream msg;
    msg << "dt*max|u| = " << dt * max_speed << " exceeds half a cell (" << 0.5 * grid.spacing() << ")";
    throw Error(ErrorKind::CflViolation, msg.str());
  }
}

void check_cfl(const VectorField& u, double dt) { check_cfl(u.max_norm(), u.grid(), dt); }

namespace {

struct FlowStep {
  VectorField displacement;
  std::vector<ScalarField> jacobian;
};

// Stage velocity (and optionally its gradient) at the displaced nodes.
void stage_eval(const VectorField& u, const VectorField& disp, const std::vector<ScalarField>* jac,
                InterpolationOptions opts, std::vector<RealArray>& vel, std::vector<RealArray>* jac_rate) {
  const int d = u.grid().dim();
  if (jac == nullptr) {
    vel = Interpolant(u, opts).evaluate_displaced(disp);
    return;
  }
  std::vector<ScalarField> fields(u.data());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) fields.push_back(derivative(u[i], j));
  auto vals = Interpolant(fields, opts).evaluate_displaced(disp);
  vel.assign(vals.begin(), vals.begin() + d);
  jac_rate->assign(d * d, RealArray::Zero(u.grid().size()));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) (*jac_rate)[i * d + j] += vals[d + i * d + k] * (*jac)[k * d + j].values();
}

FlowStep rk4_flow(const VectorField& disp0, const std::vector<ScalarField>* jac0, const VelocityProvider& u, double t,
                  double dt, InterpolationOptions opts) {
  const auto& g = disp0.grid();
  const int d = g.dim();
  const double c[4] = {0.0, 0.5, 0.5, 1.0};
  const double w[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  std::vector<RealArray> acc_d(d, RealArray::Zero(g.size()));
  std::vector<RealArray> acc_j;
  if (jac0 != nullptr) acc_j.assign(d * d, RealArray::Zero(g.size()));
  std::vector<RealArray> kd, kj;
  for (int s = 0; s < 4; ++s) {
    std::vector<ScalarField> ds;
    for (int a = 0; a < d; ++a) {
      RealArray v = disp0[a].values();
      if (s > 0) v += c[s] * dt * kd[a];
      ds.emplace_back(g, std::move(v));
    }
    std::vector<ScalarField> js;
    if (jac0 != nullptr) {
      for (int e = 0; e < d * d; ++e) {
        RealArray v = (*jac0)[e].values();
        if (s > 0) v += c[s] * dt * kj[e];
        js.emplace_back(g, std::move(v));
      }
    }
    const VectorField us = u(t + c[s] * dt);
    if (s == 0) check_cfl(us, dt);
    stage_eval(us, VectorField(std::move(ds)), jac0 != nullptr ? &js : nullptr, opts, kd, &kj);
    for (int a = 0; a < d; ++a) acc_d[a] += w[s] * kd[a];
    for (std::size_t e = 0; e < acc_j.size(); ++e) acc_j[e] += w[s] * kj[e];
  }
  FlowStep out{VectorField(g), {}};
  for (int a = 0; a < d; ++a) out.displacement[a] = ScalarField(g, disp0[a].values() + dt * acc_d[a]);
  if (jac0 != nullptr) {
    for (int e = 0; e < d * d; ++e) out.jacobian.emplace_back(g, (*jac0)[e].values() + dt * acc_j[e]);
  }
  return out;
}

}  // namespace

DiffeoMap advance_flow(const DiffeoMap& gamma, const VelocityProvider& u, double t, double dt,
                       const FlowIntegratorConfig& cfg) {
  validate(cfg);
  if (cfg.jacobian_mode == JacobianMode::transport_ode) {
    auto step = rk4_flow(gamma.displacement(), &gamma.jacobian(), u, t, dt, cfg.interp);
    return DiffeoMap(std::move(step.displacement), std::move(step.jacobian));
  }
  auto step = rk4_flow(gamma.displacement(), nullptr, u, t, dt, cfg.interp);
  return DiffeoMap(std::move(step.displacement));
}

std::vector<ScalarField> transport_jacobian_step(const std::vector<ScalarField>& jacobian, const VelocityProvider& u,
                                                 const DiffeoMap& gamma, double t, double dt,
                                                 InterpolationOptions opts) {
  return rk4_flow(gamma.displacement(), &jacobian, u, t, dt, opts).jacobian;
}

DiffeoMap integrate_flow(const VelocityProvider& u, const TorusGrid& grid, double T, const FlowIntegratorConfig& cfg) {
  validate(cfg);
  const long steps = std::lround(T / cfg.dt);
  if (steps < 0 || std::abs(steps * cfg.dt - T) > 1e-9 * std::max(1.0, std::abs(T))) {
    throw Error(ErrorKind::InvalidArgument, "horizon must be a nonnegative multiple of dt");
  }
  DiffeoMap gamma = identity_map(grid);
  for (long k = 0; k < steps; ++k) gamma = advance_flow(gamma, u, k * cfg.dt, cfg.dt, cfg);
  return gamma;
}

VelocityProvider snapshot_provider(std::vector<double> times, std::vector<VectorField> velocities) {
  if (times.empty() || times.size() != velocities.size()) {
    throw Error(ErrorKind::InvalidArgument, "snapshot provider needs one velocity per time");
  }
  if (!std::is_sorted(times.begin(), times.end())) throw Error(ErrorKind::InvalidArgument, "times must increase");
  return [times = std::move(times), vel = std::move(velocities)](double t) -> VectorField {
    if (t <= times.front()) return vel.front();
    if (t >= times.back()) return vel.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - s) * vel[k - 1] + s * vel[k];
  };
}

}  // namespace torusflow
