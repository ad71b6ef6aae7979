// SPDX-License-Identifier: Apache-2.0
#include "torusflow/harness/presets.hpp"

#include "torusflow/error.hpp"

namespace torusflow::harness {

namespace {

Json upper(double v) { return {{"max", v}}; }
Json lower(double v) { return {{"min", v}}; }

std::vector<Preset> build() {
  std::vector<Preset> p;

  p.push_back({"zero_velocity", "simulate", "rest state: every residual column stays zero",
               {{"n", 32},
                {"dt", 1e-2},
                {"checkpoints", 11},
                {"initial", {{"kind", "zero"}}},
                {"acceptance", {{"energy_drift", upper(0.0)}, {"vorticity_transport_max", upper(0.0)}}}}});

  p.push_back({"shear", "simulate", "shear flow with vorticity -cos y is a steady 2D Euler state",
               {{"n", 64},
                {"dt", 1e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "shear"}}},
                {"acceptance", {{"stationarity", upper(1e-6)}, {"energy_drift", upper(1e-6)}}}}});

  p.push_back({"taylor_green", "simulate", "Taylor-Green vorticity cos x + cos y is a steady 2D Euler state",
               {{"n", 64},
                {"dt", 1e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "taylor_green"}}},
                {"acceptance", {{"stationarity", upper(1e-6)}, {"energy_drift", upper(1e-6)}}}}});

  p.push_back({"random_conservation", "simulate", "random smooth 2D Euler flow keeps its conserved quantities",
               {{"n", 64},
                {"dt", 2e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "random"}, {"amplitude", 0.5}, {"max_mode", 3}}},
                {"acceptance",
                 {{"vorticity_transport_max", upper(1e-3)},
                  {"energy_drift", upper(1e-6)},
                  {"enstrophy_drift", upper(1e-6)},
                  {"harmonic_drift_max", upper(1e-10)},
                  {"volume_defect_max", upper(1e-4)}}}}});

  p.push_back({"translation", "simulate", "constant velocity flows by rigid translation",
               {{"n", 32},
                {"dt", 1e-2},
                {"checkpoints", 11},
                {"initial", {{"kind", "constant"}, {"value", {0.3, -0.2}}}},
                {"acceptance", {{"stationarity", upper(1e-14)}, {"vorticity_transport_max", upper(1e-14)}}}}});

  p.push_back({"burgers", "simulate", "1D L2 geodesic against implicit characteristics at half the blowup time",
               {{"family", "hr_compressible"},
                {"space_dim", 1},
                {"n", 256},
                {"horizon", 1.0 / 3.0},
                {"dt", 1.0 / 600.0},
                {"checkpoints", 5},
                {"initial", {{"kind", "sine"}, {"amplitude", 0.5}}},
                {"acceptance", {{"characteristics_error", upper(1e-5)}, {"blowup_fraction", upper(0.5 + 1e-12)}}}}});

  p.push_back({"ch_momentum", "simulate", "Camassa-Holm momentum law det Dγ (Dγ)ᵀ m∘γ = m0",
               {{"family", "hr_compressible"},
                {"space_dim", 1},
                {"n", 256},
                {"inertia", {{"r", 1}, {"alpha", 1.0}}},
                {"horizon", 0.5},
                {"dt", 5e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "sine"}, {"amplitude", 0.3}}},
                {"acceptance", {{"coadjoint_momentum_max", upper(1e-5)}, {"energy_drift", upper(1e-6)}}}}});

  p.push_back({"euler_alpha", "simulate", "Euler-alpha flow transports rot of its momentum",
               {{"family", "hr_incompressible_2d"},
                {"n", 64},
                {"inertia", {{"r", 1}, {"alpha", 1.0}}},
                {"dt", 2e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "random"}, {"amplitude", 0.5}, {"max_mode", 3}}},
                {"acceptance", {{"rot_inertia_transport_max", upper(1e-3)}, {"energy_drift", upper(1e-6)}}}}});

  p.push_back({"axisym", "simulate", "swirl-free axisymmetric 3D flow reduced to the plane and lifted back",
               {{"family", "axisym_swirlfree_3d"},
                {"n", 64},
                {"dt", 5e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "random"}, {"amplitude", 0.5}, {"max_mode", 3}}},
                {"acceptance",
                 {{"swirl_max", upper(1e-10)},
                  {"phi_transport_max", upper(1e-3)},
                  {"block_structure_defect", upper(1e-12)}}}}});

  p.push_back({"symplectic_k1", "simulate", "symplectic family on the 2-torus matches 2D Euler on the shear geodesic",
               {{"family", "symplectic_2k"},
                {"n", 64},
                {"dt", 1e-3},
                {"checkpoints", 11},
                {"initial", {{"kind", "shear"}}},
                {"acceptance",
                 {{"euler_agreement", upper(1e-12)},
                  {"symplectic_transport_max", upper(1e-3)},
                  {"laplacian_adjoint_max", upper(1e-3)}}}}});

  p.push_back({"identity_constant", "diagnose", "integral identity on a constant-velocity geodesic",
               {{"n", 32},
                {"dt", 1e-2},
                {"checkpoints", 101},
                {"initial", {{"kind", "constant"}, {"value", {0.3, -0.2}}}},
                {"lambda", {{"mode", "fixed"}, {"value", 1.0}}},
                {"diagnose", {{"coercivity", false}, {"m_operator", false}}},
                {"acceptance", {{"identity_residual", upper(1e-10)}}}}});

  p.push_back({"diagnose_shear", "diagnose",
               "shear geodesic: integral identity, λ search, P_λ quotients and M coercivity",
               {{"n", 32},
                {"dt", 1e-2},
                {"checkpoints", 101},
                {"initial", {{"kind", "shear"}}},
                {"diagnose", {{"samples", 100}, {"m_stride", 10}, {"m_samples", 8}}},
                {"acceptance",
                 {{"identity_residual", upper(1e-3)},
                  {"min_quotient", lower(0.1)},
                  {"quotient_ratio", upper(100.0)},
                  {"m_coercivity", lower(1e-12)}}}}});

  p.push_back({"m_random", "diagnose", "M coercivity along a random 2D Euler geodesic",
               {{"n", 32},
                {"dt", 1e-2},
                {"checkpoints", 11},
                {"initial", {{"kind", "random"}, {"amplitude", 0.5}, {"max_mode", 3}}},
                {"lambda", {{"mode", "fixed"}, {"value", 1.0}}},
                {"diagnose", {{"identity", false}, {"coercivity", false}, {"m_stride", 1}, {"m_samples", 8}}},
                {"acceptance", {{"m_coercivity", lower(1e-12)}}}}});

  p.push_back({"m_compressible", "diagnose", "M coercivity along a compressible H1 geodesic",
               {{"family", "hr_compressible"},
                {"n", 32},
                {"inertia", {{"r", 1}, {"alpha", 1.0}}},
                {"dt", 1e-2},
                {"checkpoints", 11},
                {"initial", {{"kind", "random"}, {"amplitude", 0.2}, {"max_mode", 2}}},
                {"lambda", {{"mode", "fixed"}, {"value", 1.0}}},
                {"diagnose", {{"identity", false}, {"coercivity", false}, {"m_stride", 1}, {"m_samples", 8}}},
                {"acceptance", {{"m_coercivity", lower(1e-12)}}}}});

  p.push_back({"rk4_sweep", "sweep", "time-step refinement of a random 2D Euler flow map",
               {{"n", 32},
                {"dt", 4e-3},
                {"checkpoints", 11},
                {"snapshots", false},
                {"initial", {{"kind", "random"}, {"amplitude", 0.5}, {"max_mode", 3}}},
                {"sweep", {{"dt", {4e-3, 2e-3, 1e-3}}}},
                {"acceptance", {{"rk4_order_error", upper(0.3)}}}}});

  p.push_back({"simpson_sweep", "sweep", "Simpson refinement of the integral identity",
               {{"n", 32},
                {"dt", 1.0 / 512.0},
                {"checkpoints", 129},
                {"snapshots", false},
                {"initial", {{"kind", "random"}, {"amplitude", 0.3}, {"max_mode", 2}}},
                {"lambda", {{"mode", "fixed"}, {"value", 1.0}}},
                {"sweep", {{"identity_strides", {64, 32, 16}}}},
                {"acceptance", {{"simpson_order_error", upper(0.5)}}}}});

  p.push_back({"shoot_identity", "shoot", "shooting at the identity returns zero velocity",
               {{"n", 32},
                {"dt", 2e-3},
                {"initial", {{"kind", "zero"}}},
                {"acceptance", {{"max_relative_error", upper(0.0)}, {"unconverged", upper(0.0)}}}}});

  p.push_back({"shooting_roundtrip", "shoot", "five seeded targets exp(u0*) recovered by Gauss-Newton shooting",
               {{"n", 32},
                {"dt", 2e-3},
                {"initial", {{"kind", "random"}, {"amplitude", 0.2}, {"max_mode", 4}}},
                {"shoot", {{"targets", 5}, {"regularity", false}}},
                {"acceptance",
                 {{"max_relative_error", upper(1e-3)},
                  {"monotone_violations", upper(0.0)},
                  {"unconverged", upper(0.0)}}}}});

  p.push_back({"regularity_probe", "shoot", "spectral decay of recovered u0 against a |ξ|^-4 forward velocity",
               {{"n", 32},
                {"dt", 2e-3},
                {"initial", {{"kind", "power_law"}, {"amplitude", 0.2}, {"max_mode", 5}, {"decay", 4.0}}},
                {"shoot", {{"targets", 1}, {"levels", {2, 5}}}},
                {"acceptance", {{"max_slope_difference", upper(0.5)}, {"unconverged", upper(0.0)}}}}});
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw Error(ErrorKind::Config, "unknown preset " + name + "; known presets: " + known);
}

}  // namespace torusflow::harness
