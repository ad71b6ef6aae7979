// SPDX-License-Identifier: Apache-2.0
#include "torusflow/harness/commands.hpp"

#include "torusflow/error.hpp"
#include "torusflow/random_fields.hpp"
#include "torusflow/regularity.hpp"
#include "torusflow/shooting.hpp"
#include "torusflow/snapshot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace torusflow::harness {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string numbered(const char* stem, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, k, ext);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void write_config(const fs::path& dir, const ExperimentConfig& c) {
  fs::create_directories(dir);
  write_text(dir / "config.json", to_json(c).dump(2) + "\n");
}

class RunWriter {
 public:
  RunWriter(const ExperimentConfig& c, std::string command) : c_(c), command_(std::move(command)) {
    if (c.output.empty()) throw Error(ErrorKind::Config, "output directory is not set; pass --out or set TORUSFLOW_OUT");
    dir_ = c.output;
    write_config(dir_, c);
  }

  const fs::path& dir() const { return dir_; }

  void table(const std::string& file, const Table& t) {
    t.write(dir_ / file);
    tables_.push_back(file);
  }

  void timing(const std::string& stage, double seconds) { timings_.emplace_back(stage, seconds); }

  RunResult finish(std::vector<Quantity> quantities) {
    auto checks = evaluate_acceptance(c_, quantities);
    table("summary.csv", summary_table(quantities, checks));
    Table manifest({"key", "value"});
    manifest.row() << "command" << command_;
    manifest.row() << "config_hash" << config_hash(c_);
    manifest.row() << "version" << TORUSFLOW_VERSION;
    manifest.row() << "family" << std::string(to_string(c_.metric.family));
    manifest.row() << "seed" << std::to_string(c_.seed);
    for (const auto& t : tables_) manifest.row() << "table" << t;
    manifest.write(dir_ / "manifest.csv");
    Table timings({"stage", "seconds"});
    for (const auto& [stage, s] : timings_) timings.row() << stage << s;
    timings.write(dir_ / "timings.csv");
    return {dir_, std::move(quantities), std::move(checks)};
  }

 private:
  const ExperimentConfig& c_;
  std::string command_;
  fs::path dir_;
  std::vector<std::string> tables_;
  std::vector<std::pair<std::string, double>> timings_;
};

double relative_or_absolute(double diff, double scale) { return scale > 0.0 ? diff / scale : diff; }

bool is_drift_law(const std::string& name) { return name == "energy" || name == "enstrophy" || name == "q_enstrophy"; }

// u = a·sin(x − 3t·u) solved pointwise by Newton.
ScalarField burgers_characteristics(const TorusGrid& g, double amplitude, double t) {
  return ScalarField::from_function(g, [=](const Point& p) {
    double u = amplitude * std::sin(p[0]);
    for (int it = 0; it < 100; ++it) {
      const double xi = p[0] - 3.0 * t * u;
      const double step = (u - amplitude * std::sin(xi)) / (1.0 + 3.0 * t * amplitude * std::cos(xi));
      u -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return u;
  });
}

double block_structure_defect(const DiffeoMap& lifted, int axis) {
  double defect = lifted.displacement()[axis].max_abs();
  for (int i = 0; i < lifted.dim(); ++i) {
    for (int j = 0; j < lifted.dim(); ++j) {
      if (i != axis && j != axis) continue;
      const double delta = i == j ? 1.0 : 0.0;
      defect = std::max(defect, (lifted.jacobian(i, j).values() - delta).abs().maxCoeff());
    }
  }
  return defect;
}

struct Simulation {
  GeodesicTrajectory traj;
  VectorField u0;
  std::vector<Quantity> quantities;
  Table diagnostics{{}};
};

Simulation simulate_core(const ExperimentConfig& c) {
  VectorField u0 = initial_velocity(c);
  GeodesicTrajectory traj = integrate_geodesic(u0, c.metric, c.integration());
  std::vector<Quantity> q;

  std::vector<std::string> header{"checkpoint", "time"};
  header.insert(header.end(), traj.diagnostic_names.begin(), traj.diagnostic_names.end());
  Table diag(header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    auto& row = diag.row();
    row << k << traj.times[k];
    if (k < traj.diagnostics.size()) {
      for (double v : traj.diagnostics[k]) row << v;
    }
  }
  for (std::size_t i = 0; i < traj.diagnostic_names.size() && !traj.diagnostics.empty(); ++i) {
    const std::string& name = traj.diagnostic_names[i];
    const double first = traj.diagnostics.front()[i];
    double drift = 0.0, hi = -INFINITY, lo = INFINITY;
    for (const auto& row : traj.diagnostics) {
      drift = std::max(drift, std::abs(row[i] - first));
      hi = std::max(hi, row[i]);
      lo = std::min(lo, row[i]);
    }
    if (is_drift_law(name)) {
      q.push_back({name, name + "_drift", relative_or_absolute(drift, std::abs(first))});
    } else if (name == "min_jacobian_det") {
      q.push_back({name, name, lo});
    } else {
      q.push_back({name, name + "_max", hi});
    }
  }

  const VectorField& start = traj.velocities.front();
  q.push_back({"stationary_state", "stationarity",
               relative_or_absolute((traj.velocities.back() - start).l2_norm(), start.l2_norm())});

  const auto& m = c.metric;
  if (m.family == MetricFamily::hr_compressible && m.space_dim == 1 && m.inertia.is_identity() &&
      c.initial.kind == "sine") {
    const auto exact = burgers_characteristics(u0.grid(), c.initial.amplitude, traj.times.back());
    const ScalarField& u = traj.velocities.back()[0];
    q.push_back({"burgers_characteristics", "characteristics_error",
                 relative_or_absolute((u - exact).l2_norm(), exact.l2_norm())});
    q.push_back({"burgers_characteristics", "blowup_fraction", traj.times.back() / burgers_blowup_time(u0[0])});
  }
  if (m.family == MetricFamily::axisym_swirlfree_3d) {
    q.push_back({"axisym_lift", "block_structure_defect",
                 block_structure_defect(axisym_lift_map(traj.maps.back(), m.killing_axis), m.killing_axis)});
  }
  if (m.family == MetricFamily::symplectic_2k && m.symplectic_k == 1) {
    const auto euler = integrate_euler2d(rot(u0), u0.mean(), c.integration());
    double gap = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      gap = std::max(gap, (traj.velocities[k] - euler.velocities[k]).max_abs());
      gap = std::max(gap, (traj.maps[k].displacement() - euler.maps[k].displacement()).max_abs());
    }
    q.push_back({"symplectic_euler_agreement", "euler_agreement", gap});
  }
  return {std::move(traj), std::move(u0), std::move(q), std::move(diag)};
}

GeodesicTrajectory thin(const GeodesicTrajectory& traj, int stride) {
  const std::size_t intervals = traj.times.size() - 1;
  if (intervals % static_cast<std::size_t>(stride) != 0) {
    throw Error(ErrorKind::Config, "diagnose.m_stride " + std::to_string(stride) + " does not divide the " +
                                       std::to_string(intervals) + " checkpoint intervals");
  }
  GeodesicTrajectory out;
  out.config = traj.config;
  out.dt = traj.dt;
  for (std::size_t k = 0; k < traj.times.size(); k += static_cast<std::size_t>(stride)) {
    out.times.push_back(traj.times[k]);
    out.maps.push_back(traj.maps[k]);
    out.velocities.push_back(traj.velocities[k]);
    if (!traj.transported.empty()) out.transported.push_back(traj.transported[k]);
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
}

double RunResult::quantity(const std::string& name) const {
  for (const auto& q : quantities) {
    if (q.name == name) return q.value;
  }
  throw Error(ErrorKind::InvalidArgument, "run reported no quantity " + name);
}

VectorField initial_velocity(const ExperimentConfig& c, std::uint64_t stream) {
  const auto& m = c.metric;
  const auto& in = c.initial;
  const TorusGrid g = c.grid();
  const bool axisym = m.family == MetricFamily::axisym_swirlfree_3d;
  const TorusGrid planar = axisym ? TorusGrid(2, c.n) : g;
  Rng rng(derive_seed(c.seed, stream));
  auto lift = [&](const VectorField& v) { return axisym ? axisym_lift_velocity(v, m.killing_axis) : v; };
  auto need_planar = [&] {
    if (planar.dim() != 2) {
      throw Error(ErrorKind::Config, "initial.kind " + in.kind + " needs a family living on a 2-torus");
    }
  };
  auto scaled = [&](const VectorField& v) { return (in.amplitude / v.max_abs()) * v; };

  if (in.kind == "zero") return VectorField(g);
  if (in.kind == "constant") {
    if (static_cast<int>(in.value.size()) != g.dim()) {
      throw Error(ErrorKind::Config, "initial.value needs " + std::to_string(g.dim()) + " components");
    }
    return VectorField::constant(g, in.value);
  }
  if (in.kind == "shear" || in.kind == "taylor_green") {
    need_planar();
    const bool shear = in.kind == "shear";
    const double a = in.amplitude;
    const auto omega = ScalarField::from_function(planar, [=](const Point& x) {
      return shear ? -a * std::cos(x[1]) : a * (std::cos(x[0]) + std::cos(x[1]));
    });
    return lift(velocity_from_vorticity(omega, {0.0, 0.0}));
  }
  if (in.kind == "sine") {
    VectorField v(g);
    v[0] = ScalarField::from_function(g, [a = in.amplitude](const Point& x) { return a * std::sin(x[0]); });
    return v;
  }
  if (in.kind == "random") {
    if (m.family == MetricFamily::hr_compressible) return scaled(random_bandlimited_vector(g, in.max_mode, rng));
    if (m.family == MetricFamily::symplectic_2k) {
      return scaled(project_symplectic(random_bandlimited_vector(g, in.max_mode, rng)));
    }
    need_planar();
    return lift(random_divergence_free(planar, in.max_mode, in.amplitude, rng));
  }
  if (m.family == MetricFamily::hr_compressible || m.family == MetricFamily::symplectic_2k) {
    throw Error(ErrorKind::Config, "initial.kind power_law needs a divergence-free family");
  }
  need_planar();
  return lift(power_law_divergence_free(planar, in.decay, in.max_mode, in.amplitude, rng));
}

void write_trajectory(const fs::path& dir, const GeodesicTrajectory& traj) {
  fs::create_directories(dir / "snapshots");
  Table index({"checkpoint", "time", "velocity", "displacement", "jacobian", "det_jacobian", "transported"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const DiffeoMap& map = traj.maps[k];
    const auto v = numbered("velocity", k, ".tfs");
    const auto d = numbered("displacement", k, ".tfs");
    const auto j = numbered("jacobian", k, ".tfs");
    const auto det = numbered("det_jacobian", k, ".tfs");
    write_snapshot(dir / "snapshots" / v, traj.velocities[k], "velocity");
    write_snapshot(dir / "snapshots" / d, map.displacement(), "displacement");
    write_snapshot(dir / "snapshots" / j, VectorField(map.jacobian()), "jacobian");
    write_snapshot(dir / "snapshots" / det, ScalarField(map.grid(), map.determinant()), "det_jacobian");
    std::string t;
    if (k < traj.transported.size()) {
      t = numbered("transported", k, ".tfs");
      write_snapshot(dir / "snapshots" / t, traj.transported[k], "transported");
    }
    index.row() << k << traj.times[k] << v << d << j << det << t;
  }
  index.write(dir / "trajectory.csv");
  Table info({"key", "value"});
  info.row() << "family" << std::string(to_string(traj.config.family));
  info.row() << "inertia_r" << traj.config.inertia.order_r;
  info.row() << "inertia_alpha" << traj.config.inertia.alpha;
  info.row() << "dt" << traj.dt;
  info.write(dir / "trajectory_info.csv");
}

GeodesicTrajectory read_trajectory(const fs::path& where, const MetricConfig& metric) {
  const fs::path dir = fs::exists(where / "trajectory" / "trajectory.csv") ? where / "trajectory" : where;
  if (!fs::exists(dir / "trajectory.csv")) {
    throw Error(ErrorKind::Io, "no trajectory at " + dir.string() + " (expected trajectory.csv from simulate)");
  }
  std::map<std::string, std::string> info;
  for (const auto& row : read_csv(dir / "trajectory_info.csv")) {
    if (row.size() == 2) info[row[0]] = row[1];
  }
  if (info["family"] != to_string(metric.family)) {
    throw Error(ErrorKind::FamilyMismatch, "trajectory at " + dir.string() + " is " + info["family"] +
                                               ", config asks for " + std::string(to_string(metric.family)));
  }
  if (std::stoi(info["inertia_r"]) != metric.inertia.order_r || std::stod(info["inertia_alpha"]) != metric.inertia.alpha) {
    throw Error(ErrorKind::FamilyMismatch, "trajectory at " + dir.string() + " was integrated with another inertia");
  }
  GeodesicTrajectory traj;
  traj.config = metric;
  traj.dt = std::stod(info["dt"]);
  const auto rows = read_csv(dir / "trajectory.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw Error(ErrorKind::Io, "malformed trajectory.csv row " + std::to_string(i));
    traj.times.push_back(std::stod(r[1]));
    traj.velocities.push_back(read_snapshot(dir / "snapshots" / r[2]).field);
    traj.maps.emplace_back(read_snapshot(dir / "snapshots" / r[3]).field);
    if (!r[6].empty()) traj.transported.push_back(read_snapshot(dir / "snapshots" / r[6]).field[0]);
  }
  if (traj.times.empty()) throw Error(ErrorKind::Io, "trajectory at " + dir.string() + " has no checkpoints");
  return traj;
}

RunResult cmd_simulate(const ExperimentConfig& c) {
  RunWriter w(c, "simulate");
  Stopwatch clock;
  Simulation sim = simulate_core(c);
  w.timing("integrate", clock.seconds());
  w.table("diagnostics.csv", sim.diagnostics);
  if (c.snapshots) {
    Stopwatch io;
    write_trajectory(w.dir() / "trajectory", sim.traj);
    w.timing("snapshots", io.seconds());
  }
  return w.finish(std::move(sim.quantities));
}

RunResult cmd_diagnose(const ExperimentConfig& c) {
  RunWriter w(c, "diagnose");
  const auto& d = c.diagnose;
  std::vector<Quantity> q;
  Stopwatch clock;
  const GeodesicTrajectory traj = d.trajectory.empty()
                                      ? integrate_geodesic(initial_velocity(c), c.metric, c.integration())
                                      : read_trajectory(d.trajectory, c.metric);
  w.timing(d.trajectory.empty() ? "integrate" : "load", clock.seconds());

  if (d.residuals) {
    Stopwatch t;
    Table res({"law", "checkpoint", "time", "residual"});
    std::map<std::string, double> worst;
    std::vector<std::string> order;
    for (const auto& row : conservation_residuals(traj, c.interp)) {
      res.row() << row.law << row.checkpoint << row.time << row.residual;
      if (!worst.count(row.law)) order.push_back(row.law);
      worst[row.law] = std::max(worst[row.law], row.residual);
    }
    for (const auto& law : order) q.push_back({law, law + "_max", worst[law]});
    w.table("residuals.csv", res);
    w.timing("residuals", t.seconds());
  }

  double lambda = c.lambda.value;
  if (d.coercivity) {
    Stopwatch t;
    const ScanOptions scan{d.samples, c.seed, 0};
    QuotientRange range{INFINITY, -INFINITY};
    int doublings = 0;
    bool converged = true;
    if (c.lambda.automatic) {
      const auto ls = search_lambda(traj, scan, c.lambda.target, InversionOptions{.interp = c.interp});
      lambda = ls.lambda;
      range = ls.range;
      doublings = ls.doublings;
      converged = ls.converged;
    } else {
      for (std::size_t k = 0; k < traj.maps.size(); ++k) {
        const auto P = build_p_lambda(traj.maps[k], lambda, InversionOptions{.interp = c.interp});
        const auto r = coercivity_scan(P, {d.samples, derive_seed(c.seed, k), 0});
        range.min = std::min(range.min, r.min);
        range.max = std::max(range.max, r.max);
      }
      converged = range.min >= c.lambda.target;
    }
    Table t_co({"law", "lambda", "doublings", "min_quotient", "max_quotient", "ratio", "converged"});
    t_co.row() << "p_lambda_coercivity" << lambda << doublings << range.min << range.max << range.max / range.min
               << (converged ? 1 : 0);
    w.table("coercivity.csv", t_co);
    q.push_back({"p_lambda_coercivity", "lambda", lambda});
    q.push_back({"p_lambda_coercivity", "min_quotient", range.min});
    q.push_back({"p_lambda_coercivity", "quotient_ratio", range.max / range.min});
    w.timing("coercivity", t.seconds());
  }

  if (d.identity) {
    Stopwatch t;
    const auto ic = verify_integral_identity(traj, lambda, d.stride);
    Table t_id({"law", "lambda", "stride", "samples", "residual", "lhs_norm", "rhs_norm"});
    t_id.row() << "integral_identity" << lambda << d.stride << ic.samples << ic.residual << ic.lhs_norm << ic.rhs_norm;
    w.table("identity.csv", t_id);
    q.push_back({"integral_identity", "identity_residual", ic.residual});
    w.timing("identity", t.seconds());
  }

  if (d.m_operator) {
    Stopwatch t;
    const auto coarse = thin(traj, d.m_stride);
    const MOperator M(coarse, c.metric, lambda, InversionOptions{.interp = c.interp});
    const double mq = m_coercivity(M, {d.m_samples, c.seed, 0});
    Table t_m({"law", "lambda", "checkpoints", "samples", "min_quotient"});
    t_m.row() << "m_operator_coercivity" << lambda << coarse.times.size() << d.m_samples << mq;
    w.table("m_operator.csv", t_m);
    q.push_back({"m_operator_coercivity", "m_coercivity", mq});
    w.timing("m_operator", t.seconds());
  }
  return w.finish(std::move(q));
}

RunResult cmd_shoot(const ExperimentConfig& c) {
  RunWriter w(c, "shoot");
  const auto& b = c.shoot;
  if (!b.target.empty() && b.targets != 1) throw Error(ErrorKind::Config, "shoot.targets must be 1 with a stored target");
  Table t_shoot({"law", "target", "converged", "steps", "exp_evaluations", "final_residual", "relative_error",
                 "monotone", "dexp_condition"});
  Table t_hist({"law", "target", "step", "residual"});
  Table t_reg({"law", "target", "fit_radius", "reference_slope", "recovered_slope", "slope_difference",
               "reference_tail", "recovered_tail"});
  double worst_error = 0.0, worst_residual = 0.0, worst_slope = 0.0;
  int unconverged = 0, non_monotone = 0, evaluations = 0;
  bool have_truth = false, have_slope = false;

  for (int t = 0; t < b.targets; ++t) {
    Stopwatch clock;
    std::optional<VectorField> truth;
    std::optional<DiffeoMap> target;
    if (b.target.empty()) {
      truth = initial_velocity(c, static_cast<std::uint64_t>(t));
      target = exp_map(*truth, c.metric, c.dt, b.interp);
    } else {
      const auto snap = read_snapshot(b.target);
      if (snap.tag != "displacement") {
        throw Error(ErrorKind::Io, b.target + " holds a " + snap.tag + " snapshot, not a displacement");
      }
      target.emplace(snap.field);
    }
    ShootingProblem p{*target, c.metric, c.dt, b.tol, b.max_iter, b.levels, b.basin_guard, b.interp};
    ShootingReport rep{VectorField(target->grid()), {}, false, 0.0, 0, {}};
    try {
      rep = shoot(p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BasinGuard) throw;
      throw Error(ErrorKind::BasinGuard,
                  "target " + std::to_string(t) + " refused (" + e.what() +
                      "); lower the target amplitude, shoot through an intermediate target, or raise shoot.basin_guard");
    }
    const auto& h = rep.residual_history;
    const bool monotone = std::is_sorted(h.rbegin(), h.rend());
    double err = NAN;
    if (truth) {
      err = relative_or_absolute((rep.u0 - *truth).l2_norm(), truth->l2_norm());
      worst_error = std::max(worst_error, err);
      have_truth = true;
    }
    t_shoot.row() << "shooting_roundtrip" << t << (rep.converged ? 1 : 0) << h.size() - 1 << rep.exp_evaluations
                  << h.back() << err << (monotone ? 1 : 0) << rep.dexp_condition;
    for (std::size_t k = 0; k < h.size(); ++k) t_hist.row() << "shooting_residual" << t << k << h[k];
    worst_residual = std::max(worst_residual, h.back());
    unconverged += rep.converged ? 0 : 1;
    non_monotone += monotone ? 0 : 1;
    evaluations += rep.exp_evaluations;
    write_snapshot(w.dir() / numbered("recovered_u0", static_cast<std::size_t>(t), ".tfs"), rep.u0, "velocity");
    const bool spectra = rep.u0.max_abs() > 0.0 && (!truth || truth->max_abs() > 0.0);
    if (b.regularity && rep.converged && spectra) {
      const auto cmp = regularity_experiment(p, rep, truth ? &*truth : nullptr);
      t_reg.row() << "regularity_probe" << t << cmp.fit_radius << cmp.target_slope << cmp.recovered_slope
                  << cmp.slope_difference << cmp.target_tail << cmp.recovered_tail;
      if (cmp.slope_defined) {
        worst_slope = std::max(worst_slope, std::abs(cmp.slope_difference));
        have_slope = true;
      }
    }
    w.timing("target_" + std::to_string(t), clock.seconds());
  }
  w.table("shoot.csv", t_shoot);
  w.table("history.csv", t_hist);
  if (b.regularity) w.table("regularity.csv", t_reg);

  std::vector<Quantity> q{{"shooting_roundtrip", "unconverged", static_cast<double>(unconverged)},
                          {"shooting_roundtrip", "monotone_violations", static_cast<double>(non_monotone)},
                          {"shooting_roundtrip", "max_final_residual", worst_residual},
                          {"shooting_roundtrip", "exp_evaluations", static_cast<double>(evaluations)}};
  if (have_truth) q.push_back({"shooting_roundtrip", "max_relative_error", worst_error});
  if (have_slope) q.push_back({"regularity_probe", "max_slope_difference", worst_slope});
  return w.finish(std::move(q));
}

RunResult cmd_sweep(const ExperimentConfig& c) {
  RunWriter w(c, "sweep");
  const auto runs = expand_sweep(c);
  Table points({"law", "run", "dt", "n", "lambda", "r", "energy_drift", "stationarity"});
  Table simpson({"law", "run", "stride", "samples", "residual", "order"});
  std::vector<VectorField> finals;
  double simpson_worst = 0.0, simpson_min = INFINITY;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Stopwatch clock;
    ExperimentConfig run = runs[i];
    run.output = (w.dir() / "runs" / numbered("run", i, "")).string();
    write_config(run.output, run);
    const Simulation sim = simulate_core(run);
    sim.diagnostics.write(fs::path(run.output) / "diagnostics.csv");
    double drift = NAN, stationarity = NAN;
    for (const auto& qq : sim.quantities) {
      if (qq.name == "energy_drift") drift = qq.value;
      if (qq.name == "stationarity") stationarity = qq.value;
    }
    points.row() << "sweep_point" << i << run.dt << run.n << run.lambda.value << run.metric.inertia.order_r << drift
                 << stationarity;
    finals.push_back(sim.traj.maps.back().displacement());
    double previous = NAN;
    int previous_stride = 0;
    for (int stride : c.sweep.identity_strides) {
      const auto ic = verify_integral_identity(sim.traj, run.lambda.value, stride, 3);
      double order = NAN;
      if (previous_stride > 0) {
        order = std::log(previous / ic.residual) / std::log(static_cast<double>(previous_stride) / stride);
        simpson_worst = std::max(simpson_worst, std::abs(order - 4.0));
        simpson_min = std::min(simpson_min, order);
      }
      simpson.row() << "integral_identity_simpson" << i << stride << ic.samples << ic.residual << order;
      previous = ic.residual;
      previous_stride = stride;
    }
    w.timing(numbered("run", i, ""), clock.seconds());
  }
  w.table("sweep.csv", points);

  Table orders({"law", "n", "lambda", "r", "dt_coarse", "dt_middle", "dt_fine", "diff_coarse", "diff_fine", "order"});
  double rk4_worst = 0.0, rk4_min = INFINITY;
  bool have_order = false;
  std::map<std::tuple<int, double, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    groups[{runs[i].n, runs[i].lambda.value, runs[i].metric.inertia.order_r}].push_back(i);
  }
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return runs[a].dt > runs[b].dt; });
    for (std::size_t k = 0; k + 2 < members.size(); ++k) {
      const auto a = members[k], b = members[k + 1], e = members[k + 2];
      const double ratio = runs[a].dt / runs[b].dt;
      if (std::abs(runs[b].dt / runs[e].dt - ratio) > 1e-9 * ratio) continue;
      const double d1 = (finals[a] - finals[b]).l2_norm();
      const double d2 = (finals[b] - finals[e]).l2_norm();
      const double order = std::log(d1 / d2) / std::log(ratio);
      orders.row() << "rk4_order" << std::get<0>(key) << std::get<1>(key) << std::get<2>(key) << runs[a].dt
                   << runs[b].dt << runs[e].dt << d1 << d2 << order;
      rk4_worst = std::max(rk4_worst, std::abs(order - 4.0));
      rk4_min = std::min(rk4_min, order);
      have_order = true;
    }
  }
  w.table("order.csv", orders);
  if (!c.sweep.identity_strides.empty()) w.table("simpson.csv", simpson);

  std::vector<Quantity> q{{"sweep_point", "runs", static_cast<double>(runs.size())}};
  if (have_order) {
    q.push_back({"rk4_order", "rk4_order", rk4_min});
    q.push_back({"rk4_order", "rk4_order_error", rk4_worst});
  }
  if (c.sweep.identity_strides.size() >= 2) {
    q.push_back({"integral_identity_simpson", "simpson_order", simpson_min});
    q.push_back({"integral_identity_simpson", "simpson_order_error", simpson_worst});
  }
  return w.finish(std::move(q));
}

RunResult run_command(const std::string& command, const ExperimentConfig& c) {
  if (command == "simulate") return cmd_simulate(c);
  if (command == "diagnose") return cmd_diagnose(c);
  if (command == "shoot") return cmd_shoot(c);
  if (command == "sweep") return cmd_sweep(c);
  throw Error(ErrorKind::Config, "unknown command " + command);
}

}  // namespace torusflow::harness
