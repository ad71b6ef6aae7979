// SPDX-License-Identifier: Apache-2.0
#include "torusflow/harness/config.hpp"

#include "torusflow/error.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace torusflow::harness {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Config, field + " " + what);
}

class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const char* key) const { return j_.contains(key); }

  const Json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const char* key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) fail(name(key), "must be a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) fail(name(key), "must be an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0) fail(name(key), "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) fail(name(key), "must be true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) fail(name(key), "must be a string");
      out = v->get<std::string>();
    }
  }
  template <typename T>
  void get(const char* key, std::vector<T>& out) {
    if (const Json* v = find(key)) {
      if (!v->is_array()) fail(name(key), "must be a list");
      out.clear();
      for (const auto& e : *v) {
        if constexpr (std::is_integral_v<T>) {
          if (!e.is_number_integer()) fail(name(key), "must hold integers");
        } else {
          if (!e.is_number()) fail(name(key), "must hold numbers");
        }
        out.push_back(e.get<T>());
      }
    }
  }

  template <typename F>
  void section(const char* key, F&& body) {
    if (const Json* v = find(key)) {
      Section s(*v, name(key));
      body(s);
      s.finish();
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(name(k), "is not a recognised key");
    }
  }

  const Json& json() const { return j_; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* scheme_name(InterpolationScheme s) {
  return s == InterpolationScheme::bspline ? "bspline" : "trigonometric";
}

void read_interp(Section& s, InterpolationOptions& o) {
  std::string scheme = scheme_name(o.scheme);
  s.get("scheme", scheme);
  if (scheme == "bspline") {
    o.scheme = InterpolationScheme::bspline;
  } else if (scheme == "trigonometric") {
    o.scheme = InterpolationScheme::trigonometric;
  } else {
    fail(s.name("scheme"), "must be bspline or trigonometric");
  }
  s.get("degree", o.degree);
  if (o.degree < 1 || o.degree % 2 == 0) fail(s.name("degree"), "must be a positive odd integer");
}

Json interp_json(const InterpolationOptions& o) { return {{"scheme", scheme_name(o.scheme)}, {"degree", o.degree}}; }

const std::set<std::string> kInitialKinds{"zero", "constant", "shear", "taylor_green", "sine", "random", "power_law"};

void check(bool ok, const std::string& field, const char* what) {
  if (!ok) fail(field, what);
}

}  // namespace

IntegrationOptions ExperimentConfig::integration() const {
  IntegrationOptions o;
  o.T = horizon;
  o.dt = dt;
  o.checkpoints = checkpoints;
  o.interp = interp;
  return o;
}

TorusGrid ExperimentConfig::grid() const { return TorusGrid(metric.grid_dim(), n); }

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  Section root(j, "");
  std::string family(to_string(c.metric.family));
  root.get("family", family);
  try {
    c.metric.family = parse_family(family);
  } catch (const Error&) {
    fail("family", "names no known metric family: " + family);
  }
  root.get("n", c.n);
  root.get("space_dim", c.metric.space_dim);
  root.get("killing_axis", c.metric.killing_axis);
  root.get("symplectic_k", c.metric.symplectic_k);
  root.section("inertia", [&](Section& s) {
    s.get("r", c.metric.inertia.order_r);
    s.get("alpha", c.metric.inertia.alpha);
    std::string kind = c.metric.inertia.family == InertiaFamily::identity ? "identity" : "bessel_power";
    s.get("kind", kind);
    if (kind == "identity") {
      c.metric.inertia.family = InertiaFamily::identity;
    } else if (kind == "bessel_power") {
      c.metric.inertia.family = InertiaFamily::bessel_power;
    } else {
      fail(s.name("kind"), "must be identity or bessel_power");
    }
  });
  root.section("lambda", [&](Section& s) {
    std::string mode = c.lambda.automatic ? "auto" : "fixed";
    s.get("mode", mode);
    if (mode != "auto" && mode != "fixed") fail(s.name("mode"), "must be auto or fixed");
    c.lambda.automatic = mode == "auto";
    s.get("value", c.lambda.value);
    s.get("target", c.lambda.target);
    check(c.lambda.value > 0.0, s.name("value"), "must be positive");
    check(c.lambda.target > 0.0, s.name("target"), "must be positive");
  });
  root.get("dt", c.dt);
  root.get("horizon", c.horizon);
  root.get("checkpoints", c.checkpoints);
  root.get("seed", c.seed);
  root.get("output", c.output);
  root.get("snapshots", c.snapshots);
  root.section("interpolation", [&](Section& s) { read_interp(s, c.interp); });
  root.section("initial", [&](Section& s) {
    s.get("kind", c.initial.kind);
    if (!kInitialKinds.count(c.initial.kind)) fail(s.name("kind"), "names no known initial condition: " + c.initial.kind);
    s.get("amplitude", c.initial.amplitude);
    s.get("max_mode", c.initial.max_mode);
    s.get("decay", c.initial.decay);
    s.get("value", c.initial.value);
    check(c.initial.max_mode >= 1, s.name("max_mode"), "must be at least 1");
  });
  root.section("diagnose", [&](Section& s) {
    auto& d = c.diagnose;
    s.get("trajectory", d.trajectory);
    s.get("samples", d.samples);
    s.get("stride", d.stride);
    s.get("m_stride", d.m_stride);
    s.get("m_samples", d.m_samples);
    s.get("identity", d.identity);
    s.get("coercivity", d.coercivity);
    s.get("m_operator", d.m_operator);
    s.get("residuals", d.residuals);
    check(d.samples >= 1, s.name("samples"), "must be positive");
    check(d.stride >= 1, s.name("stride"), "must be positive");
    check(d.m_stride >= 1, s.name("m_stride"), "must be positive");
    check(d.m_samples >= 1, s.name("m_samples"), "must be positive");
  });
  root.section("shoot", [&](Section& s) {
    auto& b = c.shoot;
    s.get("target", b.target);
    s.get("targets", b.targets);
    s.get("tol", b.tol);
    s.get("max_iter", b.max_iter);
    s.get("levels", b.levels);
    s.get("basin_guard", b.basin_guard);
    s.get("regularity", b.regularity);
    s.section("interpolation", [&](Section& t) { read_interp(t, b.interp); });
    check(b.targets >= 1, s.name("targets"), "must be positive");
    check(b.tol > 0.0, s.name("tol"), "must be positive");
    check(b.max_iter >= 1, s.name("max_iter"), "must be positive");
    check(!b.levels.empty(), s.name("levels"), "must not be empty");
    check(b.basin_guard > 0.0, s.name("basin_guard"), "must be positive");
  });
  root.section("sweep", [&](Section& s) {
    s.get("dt", c.sweep.dt);
    s.get("n", c.sweep.n);
    s.get("lambda", c.sweep.lambda);
    s.get("r", c.sweep.r);
    s.get("identity_strides", c.sweep.identity_strides);
    for (double v : c.sweep.dt) check(v > 0.0, s.name("dt"), "entries must be positive");
    for (int v : c.sweep.n) check(v >= 4, s.name("n"), "entries must be at least 4");
    for (double v : c.sweep.lambda) check(v > 0.0, s.name("lambda"), "entries must be positive");
    for (int v : c.sweep.r) check(v >= 0, s.name("r"), "entries must be non-negative");
    for (int v : c.sweep.identity_strides) check(v >= 1, s.name("identity_strides"), "entries must be positive");
  });
  if (const Json* a = root.find("acceptance")) {
    if (!a->is_object()) fail("acceptance", "must be an object");
    for (const auto& [name, spec] : a->items()) {
      Section s(spec, "acceptance." + name);
      Bound b;
      const bool has_max = s.has("max"), has_min = s.has("min");
      if (has_max == has_min) fail("acceptance." + name, "needs exactly one of max or min");
      if (has_max) {
        s.get("max", b.limit);
      } else {
        s.get("min", b.limit);
        b.lower = true;
      }
      s.finish();
      c.acceptance[name] = b;
    }
  }
  root.finish();

  check(c.n >= 4 && c.n % 2 == 0, "n", "must be an even integer of at least 4");
  check(c.dt > 0.0, "dt", "must be positive");
  check(c.horizon > 0.0, "horizon", "must be positive");
  check(c.checkpoints >= 2, "checkpoints", "must be at least 2");
  try {
    validate(c.metric);
    validate(c.interp);
    validate(c.integration());
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  sweep_size(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["family"] = std::string(to_string(c.metric.family));
  j["n"] = c.n;
  j["space_dim"] = c.metric.space_dim;
  j["killing_axis"] = c.metric.killing_axis;
  j["symplectic_k"] = c.metric.symplectic_k;
  j["inertia"] = {{"r", c.metric.inertia.order_r},
                  {"alpha", c.metric.inertia.alpha},
                  {"kind", c.metric.inertia.family == InertiaFamily::identity ? "identity" : "bessel_power"}};
  j["lambda"] = {{"mode", c.lambda.automatic ? "auto" : "fixed"}, {"value", c.lambda.value}, {"target", c.lambda.target}};
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["checkpoints"] = c.checkpoints;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["snapshots"] = c.snapshots;
  j["interpolation"] = interp_json(c.interp);
  j["initial"] = {{"kind", c.initial.kind},
                  {"amplitude", c.initial.amplitude},
                  {"max_mode", c.initial.max_mode},
                  {"decay", c.initial.decay},
                  {"value", c.initial.value}};
  const auto& d = c.diagnose;
  j["diagnose"] = {{"trajectory", d.trajectory}, {"samples", d.samples},     {"stride", d.stride},
                   {"m_stride", d.m_stride},     {"m_samples", d.m_samples}, {"identity", d.identity},
                   {"coercivity", d.coercivity}, {"m_operator", d.m_operator}, {"residuals", d.residuals}};
  const auto& b = c.shoot;
  j["shoot"] = {{"target", b.target},
                {"targets", b.targets},
                {"tol", b.tol},
                {"max_iter", b.max_iter},
                {"levels", b.levels},
                {"basin_guard", b.basin_guard},
                {"regularity", b.regularity},
                {"interpolation", interp_json(b.interp)}};
  j["sweep"] = {{"dt", c.sweep.dt},
                {"n", c.sweep.n},
                {"lambda", c.sweep.lambda},
                {"r", c.sweep.r},
                {"identity_strides", c.sweep.identity_strides}};
  Json acc = Json::object();
  for (const auto& [name, bound] : c.acceptance) acc[name] = {{bound.lower ? "min" : "max", bound.limit}};
  j["acceptance"] = acc;
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  Json j = to_json(c);
  j.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::size_t sweep_size(const ExperimentConfig& c) {
  const auto len = [](std::size_t s) { return s == 0 ? std::size_t{1} : s; };
  const std::size_t total = len(c.sweep.dt.size()) * len(c.sweep.n.size()) * len(c.sweep.lambda.size()) *
                            len(c.sweep.r.size());
  if (total > 256) fail("sweep", "expands to " + std::to_string(total) + " runs, above the limit of 256");
  return total;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c) {
  sweep_size(c);
  const auto or_base = [](const auto& list, auto base) {
    return list.empty() ? std::vector<decltype(base)>{base} : std::vector<decltype(base)>(list.begin(), list.end());
  };
  const auto dts = or_base(c.sweep.dt, c.dt);
  const auto ns = or_base(c.sweep.n, c.n);
  const auto lambdas = or_base(c.sweep.lambda, c.lambda.value);
  const auto rs = or_base(c.sweep.r, c.metric.inertia.order_r);
  std::vector<ExperimentConfig> runs;
  for (int r : rs) {
    for (double lambda : lambdas) {
      for (int n : ns) {
        for (double dt : dts) {
          ExperimentConfig run = c;
          run.sweep = {};
          run.dt = dt;
          run.n = n;
          run.metric.inertia.order_r = r;
          if (!c.sweep.lambda.empty()) {
            run.lambda.automatic = false;
            run.lambda.value = lambda;
          }
          runs.push_back(parse_config(to_json(run)));
        }
      }
    }
  }
  return runs;
}

}  // namespace torusflow::harness
