// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/euler_arnold.hpp"
#include "torusflow/random_fields.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace torusflow {

/// P_λ = λ − Σ p_ij ∂_i∂_j with p = (Dγ·Dγᵀ)∘γ⁻¹, acting on each component.
struct PLambdaOperator {
  double lambda = 1.0;
  /// Row-major dim×dim, symmetric.
  std::vector<ScalarField> p;
  DiffeoMap source_map;

  const ScalarField& coeff(int i, int j) const { return p.at(i * source_map.dim() + j); }
};

/// Throws NonInvertible when γ cannot be inverted and InvalidArgument when p is not positive definite.
PLambdaOperator build_p_lambda(const DiffeoMap& gamma, double lambda, InversionOptions inversion = {});
PLambdaOperator build_p_lambda(const DiffeoMap& gamma, const DiffeoMap& inverse, double lambda,
                               InterpolationOptions interp = {});
VectorField apply_p_lambda(const PLambdaOperator& P, const VectorField& v);
/// Σ p_ij ∂_i∂_j v with dealiased products.
VectorField apply_p_principal(const PLambdaOperator& P, const VectorField& v);

struct QuotientRange {
  double min = 0.0;
  double max = 0.0;
};

struct ScanOptions {
  int samples = 100;
  std::uint64_t seed = 1;
  /// Highest mode of the random samples; 0 picks n/4.
  int max_mode = 0;
};

/// Extremes of ⟨P v, v⟩/‖v‖²_{H¹} over random band-limited v.
QuotientRange coercivity_scan(const PLambdaOperator& P, const ScanOptions& scan);
/// ⟨P v, v⟩/‖v‖²_{H¹} for one field; throws ZeroField for v = 0.
double rayleigh_quotient(const PLambdaOperator& P, const VectorField& v);

struct LambdaSearch {
  double lambda = 1.0;
  QuotientRange range;
  int doublings = 0;
  bool converged = false;
};

/// Doubles λ from 1 until the smallest quotient over all checkpoints and samples reaches `target`.
/// The quotient is affine in λ, so each sample is assembled once. Gives up after λ = 2¹⁶.
LambdaSearch search_lambda(const GeodesicTrajectory& traj, const ScanOptions& scan, double target = 0.1,
                           InversionOptions inversion = {});

struct IdentityCheck {
  double residual = 0.0;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  int samples = 0;
};

/// Compares Δη with −Dη∫Dγ⁻¹(P_λv)∘γ dt + λDη∫Dγ⁻¹(v∘γ) dt, the time integrals by
/// composite Simpson over every `stride`-th checkpoint. Needs at least 50 samples unless
/// `min_samples` is lowered.
IdentityCheck verify_integral_identity(const GeodesicTrajectory& traj, double lambda, int stride = 1,
                                       int min_samples = 50);

/// Time-averaged conjugated P_λ along a trajectory.
///
/// Compressible form: M v = ∫ Ad⁻¹_γ A^{−r/2} P_λ A^{r/2} (Ad⁻¹_γ)^{*r} v dt.
/// Incompressible form: M v = ∫ R_γ Δ^{−1/2} π₀ P_λ Δ^{−1/2} R_γ⁻¹ v dt.
class MOperator {
 public:
  MOperator(const GeodesicTrajectory& traj, const MetricConfig& config, double lambda,
            InversionOptions inversion = {});

  VectorField apply(const VectorField& v) const;
  bool incompressible() const noexcept { return incompressible_; }
  const InertiaSpec& inertia() const noexcept { return inertia_; }
  const TorusGrid& grid() const { return maps_.front().grid(); }

 private:
  VectorField apply_at(std::size_t k, const VectorField& v) const;

  bool incompressible_ = true;
  InertiaSpec inertia_;
  InterpolationOptions interp_;
  std::vector<DiffeoMap> maps_;
  std::vector<DiffeoMap> inverses_;
  std::vector<PLambdaOperator> ops_;
  std::vector<double> weights_;
};

VectorField apply_m_operator(const VectorField& v, const GeodesicTrajectory& traj, const MetricConfig& config,
                             double lambda);

/// Smallest ⟨Mv, v⟩/‖v‖²_{L²} (incompressible) or ⟨Mv, v⟩_{H^r}/‖v‖²_{H^{r+1}} (compressible)
/// over random samples.
double m_coercivity(const MOperator& M, const ScanOptions& scan);
double m_coercivity(const GeodesicTrajectory& traj, const MetricConfig& config, double lambda,
                    const ScanOptions& scan);

struct ResidualRow {
  std::string law;
  std::size_t checkpoint = 0;
  double time = 0.0;
  double residual = 0.0;
};

/// Per-checkpoint residuals of every conservation law the trajectory's family satisfies.
std::vector<ResidualRow> conservation_residuals(const GeodesicTrajectory& traj, InterpolationOptions interp = {});

struct Shell {
  int radius = 0;
  int modes = 0;
  double energy = 0.0;
};

struct RegularityReport {
  std::vector<std::pair<double, double>> sobolev_table;
  std::vector<Shell> shells;
  double decay_slope = 0.0;
  bool slope_defined = false;
};

/// Shells group modes by rounded |ξ|. The slope is a mode-count weighted least squares fit of
/// log(energy/modes) against log(radius) over complete shells (1 ≤ radius < n/2) with energy above 1e−24.
RegularityReport regularity_report(const VectorField& u, const std::vector<double>& s_values = {0, 1, 2, 3});
std::vector<Shell> shell_energies(const VectorField& u);
/// The same fit restricted to shells 1 ≤ radius ≤ max_radius; empty with fewer than two usable shells.
std::optional<double> decay_slope(const std::vector<Shell>& shells, int max_radius);

}  // namespace torusflow
