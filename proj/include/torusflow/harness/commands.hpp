// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/harness/config.hpp"
#include "torusflow/harness/tables.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace torusflow::harness {

/// What a command leaves behind. Every run directory holds config.json (resolved), manifest.csv,
/// summary.csv, timings.csv and the command's own tables. Only timings.csv varies between repeats.
struct RunResult {
  std::filesystem::path dir;
  std::vector<Quantity> quantities;
  std::vector<CheckOutcome> checks;

  bool passed() const;
  /// 0 when every acceptance bound holds, 1 otherwise.
  int exit_code() const { return passed() ? 0 : 1; }
  /// Value of a reported quantity; throws InvalidArgument when absent.
  double quantity(const std::string& name) const;
};

/// Initial velocity of the configured kind; random kinds draw from stream `stream` of the seed.
VectorField initial_velocity(const ExperimentConfig& c, std::uint64_t stream = 0);

/// Integrates, writes diagnostics.csv (one column per law) and, with snapshots on, the trajectory.
RunResult cmd_simulate(const ExperimentConfig& c);
/// Conservation residuals, λ search, integral identity and M coercivity on a stored or fresh trajectory.
RunResult cmd_diagnose(const ExperimentConfig& c);
/// Shoots at a stored target or at exp of generated initial velocities and compares spectra.
RunResult cmd_shoot(const ExperimentConfig& c);
/// Cross product of dt, n, λ and r with time-step and Simpson order tables.
RunResult cmd_sweep(const ExperimentConfig& c);

RunResult run_command(const std::string& command, const ExperimentConfig& c);

/// snapshots/ with velocity, displacement, Jacobian, det Dγ and transported scalar per checkpoint,
/// indexed by trajectory.csv. Axisymmetric trajectories are stored in their planar form.
void write_trajectory(const std::filesystem::path& dir, const GeodesicTrajectory& traj);
/// Reads a trajectory written by simulate, given its run directory or its trajectory/ subdirectory.
/// The Jacobians are recomputed spectrally.
GeodesicTrajectory read_trajectory(const std::filesystem::path& dir, const MetricConfig& metric);

}  // namespace torusflow::harness
