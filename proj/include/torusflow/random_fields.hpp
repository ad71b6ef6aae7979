// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/field.hpp"

#include <cstdint>
#include <random>

namespace torusflow {

using Rng = std::mt19937_64;

/// Zero-mean field with Gaussian coefficients on modes |k_a| <= max_mode.
ScalarField random_bandlimited(const TorusGrid& grid, int max_mode, Rng& rng);
/// Band-limited field with dim components, zero mean.
VectorField random_bandlimited_vector(const TorusGrid& grid, int max_mode, Rng& rng);
/// Band-limited divergence-free zero-mean field scaled so that its largest component magnitude equals `amplitude`.
VectorField random_divergence_free(const TorusGrid& grid, int max_mode, double amplitude, Rng& rng);
/// Zero-mean field with |f̂(ξ)| = |ξ|^{−decay} and random phases, restricted to shells of rounded radius <= max_mode.
ScalarField power_law_field(const TorusGrid& grid, double decay, int max_mode, Rng& rng);
/// Divergence-free power-law field on a two-dimensional grid: ∇⊥ of a stream function with decay + 1.
VectorField power_law_divergence_free(const TorusGrid& grid, double decay, int max_mode, double amplitude, Rng& rng);

/// Seed for stream `index` derived from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace torusflow
