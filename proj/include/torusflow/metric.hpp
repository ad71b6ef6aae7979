// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/spectral.hpp"

#include <string>
#include <string_view>

namespace torusflow {

enum class MetricFamily {
  l2_incompressible_2d,
  hr_incompressible_2d,
  hr_compressible,
  axisym_swirlfree_3d,
  symplectic_2k,
};

std::string_view to_string(MetricFamily f);
/// Throws Config on unknown names.
MetricFamily parse_family(std::string_view name);

struct MetricConfig {
  MetricFamily family = MetricFamily::l2_incompressible_2d;
  InertiaSpec inertia{};
  /// λ of P_λ.
  double lambda_reg = 1.0;
  /// Space dimension for hr_compressible (1 or 2).
  int space_dim = 2;
  /// Killing direction for the axisymmetric family.
  int killing_axis = 2;
  /// Half the dimension of the symplectic torus.
  int symplectic_k = 1;

  /// Dimension of the grid the family's fields live on.
  int grid_dim() const noexcept;
};

void validate(const MetricConfig& config);

}  // namespace torusflow
