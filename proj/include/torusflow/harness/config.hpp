// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/euler_arnold.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace torusflow::harness {

using Json = nlohmann::json;

/// How the initial velocity is built. Kinds: zero, constant, shear, taylor_green, sine, random, power_law.
struct InitialSpec {
  std::string kind = "shear";
  double amplitude = 1.0;
  int max_mode = 4;
  /// Spectral decay exponent of power_law.
  double decay = 4.0;
  /// Components of constant.
  std::vector<double> value;
};

struct LambdaPolicy {
  bool automatic = true;
  double value = 1.0;
  /// Smallest Rayleigh quotient the search must reach.
  double target = 0.1;
};

struct DiagnoseBlock {
  /// Trajectory directory written by simulate; empty integrates in memory.
  std::string trajectory;
  int samples = 100;
  /// Checkpoint stride of the integral identity.
  int stride = 1;
  /// Checkpoint stride of the trajectory handed to M.
  int m_stride = 10;
  int m_samples = 8;
  bool identity = true;
  bool coercivity = true;
  bool m_operator = true;
  bool residuals = true;
};

struct ShootBlock {
  /// Target map snapshot; empty shoots at exp of the initial velocity.
  std::string target;
  /// Number of generated targets, seeded from the master seed.
  int targets = 1;
  double tol = 1e-6;
  int max_iter = 20;
  std::vector<int> levels{2, 4, 8, 0};
  double basin_guard = 0.5;
  InterpolationOptions interp{InterpolationScheme::bspline, 3};
  bool regularity = true;
};

struct SweepBlock {
  std::vector<double> dt;
  std::vector<int> n;
  std::vector<double> lambda;
  std::vector<int> r;
  /// Integral identity strides evaluated on every run.
  std::vector<int> identity_strides;
};

/// Acceptance bound on a reported quantity: value ≤ limit, or ≥ limit for lower bounds.
struct Bound {
  double limit = 0.0;
  bool lower = false;
};

struct ExperimentConfig {
  MetricConfig metric;
  int n = 64;
  LambdaPolicy lambda;
  double dt = 1e-3;
  double horizon = 1.0;
  int checkpoints = 101;
  std::uint64_t seed = 1;
  std::string output;
  InterpolationOptions interp{};
  InitialSpec initial;
  bool snapshots = true;
  DiagnoseBlock diagnose;
  ShootBlock shoot;
  SweepBlock sweep;
  std::map<std::string, Bound> acceptance;

  IntegrationOptions integration() const;
  TorusGrid grid() const;
};

/// Parses and validates; unknown keys and out-of-range values throw Config naming the field.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved form, defaults included.
Json to_json(const ExperimentConfig& c);
/// FNV-1a 64 of the resolved config without the output directory, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
std::uint64_t fnv1a(const std::string& bytes);

/// Sizes of the sweep cross product; throws Config above 256 runs.
std::size_t sweep_size(const ExperimentConfig& c);
/// The cross product, dt fastest, each entry a full config.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c);

}  // namespace torusflow::harness
