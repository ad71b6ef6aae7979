// SPDX-License-Identifier: Apache-2.0
#include "torusflow/shooting.hpp"

#include "torusflow/error.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace torusflow {

namespace {

Eigen::VectorXd flatten(const VectorField& v) {
  const Index size = v.grid().size();
  Eigen::VectorXd out(v.components() * size);
  for (int c = 0; c < v.components(); ++c) out.segment(c * size, size) = v[c].values().matrix();
  return out * std::sqrt(v.grid().cell_volume());
}

double relative(double r, double scale) { return scale > 0.0 ? r / scale : r; }

}  // namespace

DiffeoMap exp_map(const VectorField& u0, const MetricConfig& config, double dt, InterpolationOptions interp) {
  IntegrationOptions o;
  o.T = 1.0;
  o.dt = dt;
  o.checkpoints = 2;
  o.interp = interp;
  o.diagnostics = false;
  const auto traj = integrate_geodesic(u0, config, o);
  if (config.family == MetricFamily::axisym_swirlfree_3d) return axisym_lift_map(traj.maps.back(), config.killing_axis);
  return traj.maps.back();
}

VectorField dexp_action(const VectorField& u0, const VectorField& w, const MetricConfig& config, double dt, double h,
                        InterpolationOptions interp) {
  const double norm = w.l2_norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "direction must have unit L2 norm, got " << norm;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  if (!(h > 0.0)) h = 1e-4 * (1.0 + u0.l2_norm());
  const DiffeoMap plus = exp_map(u0 + h * w, config, dt, interp);
  const DiffeoMap minus = exp_map(u0 - h * w, config, dt, interp);
  return (0.5 / h) * (plus.displacement() - minus.displacement());
}

Eigen::MatrixXd admissible_basis(const TorusGrid& g, const MetricConfig& config, int max_mode) {
  const int d = g.dim();
  const Index size = g.size();
  const int K = std::min(max_mode <= 0 ? g.n() / 2 - 1 : max_mode, g.n() / 2 - 1);
  std::vector<Index> reps;
  for (Index f = 0; f < size; ++f) {
    const auto idx = g.multi_index(f);
    auto neg = idx;
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const int k = g.wavenumbers(a)[f];
      if (std::abs(k) > K) keep = false;
      neg[a] = -idx[a];
    }
    if (keep && f <= g.flat_index(neg)) reps.push_back(f);
  }
  std::vector<VectorField> raw;
  for (Index f : reps) {
    std::array<int, kMaxDim> k{};
    for (int a = 0; a < d; ++a) k[a] = g.wavenumbers(a)[f];
    const bool zero = f == 0;
    for (int phase = 0; phase < (zero ? 1 : 2); ++phase) {
      const ScalarField s = ScalarField::from_function(g, [&](const Point& x) {
        double arg = 0.0;
        for (int a = 0; a < d; ++a) arg += k[a] * x[a];
        return zero ? 1.0 : (phase == 0 ? std::cos(arg) : std::sin(arg));
      });
      for (int c = 0; c < d; ++c) {
        VectorField v(g);
        v[c] = s;
        raw.push_back(project_admissible(v, config));
      }
    }
  }
  Eigen::MatrixXd A(d * size, static_cast<Index>(raw.size()));
  for (std::size_t j = 0; j < raw.size(); ++j) A.col(static_cast<Index>(j)) = flatten(raw[j]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-8);
  const Index rank = qr.rank();
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), rank);
  return Q;
}

VectorField from_coefficients(const TorusGrid& g, int components, const Eigen::MatrixXd& basis,
                              const Eigen::VectorXd& c) {
  const Eigen::VectorXd flat = basis * c / std::sqrt(g.cell_volume());
  std::vector<ScalarField> comps;
  for (int a = 0; a < components; ++a) comps.emplace_back(g, RealArray(flat.segment(a * g.size(), g.size()).array()));
  return VectorField(std::move(comps));
}

namespace {

class Shooter {
 public:
  explicit Shooter(const ShootingProblem& p) : p_(p), g_(p.target.grid()) {
    target_ = flatten(p.target.displacement());
    scale_ = target_.norm();
  }

  Eigen::VectorXd residual(const VectorField& u0) {
    ++evaluations;
    return flatten(exp_map(u0, p_.config, p_.dt, p_.interp).displacement()) - target_;
  }

  Eigen::MatrixXd jacobian(const VectorField& u0, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd J(target_.size(), B.cols());
    const double h = 1e-4 * (1.0 + u0.l2_norm());
    for (Index j = 0; j < B.cols(); ++j) {
      const VectorField w = from_coefficients(g_, g_.dim(), B, Eigen::VectorXd::Unit(B.cols(), j));
      const Eigen::VectorXd plus = residual(u0 + h * w);
      const Eigen::VectorXd minus = residual(u0 - h * w);
      J.col(j) = (plus - minus) / (2.0 * h);
    }
    return J;
  }

  double rel(const Eigen::VectorXd& r) const { return relative(r.norm(), scale_); }

  int evaluations = 0;

 private:
  const ShootingProblem& p_;
  TorusGrid g_;
  Eigen::VectorXd target_;
  double scale_ = 0.0;
};

}  // namespace

void validate(const ShootingProblem& p) {
  validate(p.config);
  validate(p.interp);
  if (!(p.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(p.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (p.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");
  if (p.coarse_to_fine.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one mode cutoff");
  const auto& g = p.target.grid();
  if (g.dim() != p.config.grid_dim()) {
    throw Error(ErrorKind::FamilyMismatch, std::string(to_string(p.config.family)) + " expects a " +
                                               std::to_string(p.config.grid_dim()) + "D target");
  }
  const double min_det = p.target.determinant().minCoeff();
  if (!(min_det > 0.0)) {
    std::ostringstream msg;
    msg << "target is not orientation preserving (min det " << min_det << ")";
    throw Error(ErrorKind::NonInvertible, msg.str());
  }
  const double reach = p.target.displacement().max_norm();
  if (reach > p.basin_guard) {
    std::ostringstream msg;
    msg << "target displacement " << reach << " exceeds the basin guard " << p.basin_guard;
    throw Error(ErrorKind::BasinGuard, msg.str());
  }
}

ShootingReport shoot(const ShootingProblem& p) {
  validate(p);
  const auto& g = p.target.grid();
  Shooter s(p);
  ShootingReport rep{VectorField(g), {}, false, 0.0, 0, {}};
  Eigen::VectorXd r = s.residual(rep.u0);
  double res = s.rel(r);
  rep.residual_history.push_back(res);
  Eigen::MatrixXd J;
  for (int cutoff : p.coarse_to_fine) {
    if (res <= p.tol) break;
    const Eigen::MatrixXd B = admissible_basis(g, p.config, cutoff);
    J = s.jacobian(rep.u0, B);
    bool fresh = true;
    for (int it = 0; it < p.max_iter && res > p.tol; ++it) {
      Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-14);
      cg.setMaxIterations(4 * static_cast<int>(B.cols()) + 10);
      const Eigen::MatrixXd normal = J.transpose() * J;
      cg.compute(normal);
      const Eigen::VectorXd delta = cg.solve(-J.transpose() * r);
      double step = 1.0;
      bool accepted = false;
      std::optional<VectorField> trial_u;
      Eigen::VectorXd trial_r;
      double trial_res = 0.0;
      for (int halving = 0; halving <= 20; ++halving, step *= 0.5) {
        trial_u = project_admissible(rep.u0 + from_coefficients(g, g.dim(), B, step * delta), p.config);
        trial_r = s.residual(*trial_u);
        trial_res = s.rel(trial_r);
        if (trial_res < res) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (!fresh) {
          // A stale Jacobian may be the culprit; retry once with a fresh one.
          J = s.jacobian(rep.u0, B);
          fresh = true;
          continue;
        }
        rep.failure = "line search failed after 20 halvings at cutoff " + std::to_string(cutoff);
        break;
      }
      const double ratio = trial_res / res;
      rep.u0 = std::move(*trial_u);
      r = std::move(trial_r);
      res = trial_res;
      rep.residual_history.push_back(res);
      fresh = false;
      if (res <= p.tol) break;
      // The cutoff cannot represent the rest; move to the next one.
      if (ratio > 0.9) break;
      // Slow contraction means the chord Jacobian has drifted.
      if (ratio > 0.25) {
        J = s.jacobian(rep.u0, B);
        fresh = true;
      }
    }
  }
  rep.converged = res <= p.tol;
  if (!rep.converged && rep.failure.empty()) rep.failure = "tolerance not reached";
  if (rep.converged) rep.failure.clear();
  if (J.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    rep.dexp_condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  } else {
    rep.dexp_condition = dexp_condition(rep.u0, p.config, p.dt, 2, p.interp);
  }
  rep.exp_evaluations = s.evaluations;
  return rep;
}

double dexp_condition(const VectorField& u0, const MetricConfig& config, double dt, int max_mode,
                      InterpolationOptions interp) {
  const auto& g = u0.grid();
  const Eigen::MatrixXd B = admissible_basis(g, config, max_mode);
  Eigen::MatrixXd J(g.dim() * g.size(), B.cols());
  for (Index j = 0; j < B.cols(); ++j) {
    const VectorField w = from_coefficients(g, g.dim(), B, Eigen::VectorXd::Unit(B.cols(), j));
    J.col(j) = flatten(dexp_action(u0, w, config, dt, 0.0, interp));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
}

RegularityComparison regularity_experiment(const ShootingProblem& problem, const ShootingReport& report,
                                           const VectorField* forward) {
  if (!report.converged) throw Error(ErrorKind::NotConverged, "shooting did not converge: " + report.failure);
  RegularityComparison out;
  out.target = regularity_report(forward ? *forward : problem.target.displacement());
  out.recovered = regularity_report(report.u0);
  const int n = problem.target.grid().n();
  out.fit_radius = 0;
  for (const auto& s : out.target.shells) {
    if (s.energy > 1e-24 && 2 * s.radius < n) out.fit_radius = std::max(out.fit_radius, s.radius);
  }
  const auto target_slope = decay_slope(out.target.shells, out.fit_radius);
  const auto recovered_slope = decay_slope(out.recovered.shells, out.fit_radius);
  out.slope_defined = target_slope && recovered_slope;
  if (out.slope_defined) {
    out.target_slope = *target_slope;
    out.recovered_slope = *recovered_slope;
    out.slope_difference = *recovered_slope - *target_slope;
  }
  auto tail = [n](const RegularityReport& r) {
    double hi = 0.0, total = 0.0;
    for (const auto& s : r.shells) {
      total += s.energy;
      if (4 * s.radius > n) hi += s.energy;
    }
    return total > 0.0 ? hi / total : 0.0;
  };
  out.target_tail = tail(out.target);
  out.recovered_tail = tail(out.recovered);
  out.recovered_steep = out.recovered_tail < 1e-12;
  return out;
}

}  // namespace torusflow
