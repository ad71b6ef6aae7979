// SPDX-License-Identifier: Apache-2.0
#include "torusflow/metric.hpp"

#include "torusflow/error.hpp"

#include <array>
#include <utility>

namespace torusflow {

namespace {

constexpr std::array<std::pair<MetricFamily, std::string_view>, 5> kNames{{
    {MetricFamily::l2_incompressible_2d, "l2_incompressible_2d"},
    {MetricFamily::hr_incompressible_2d, "hr_incompressible_2d"},
    {MetricFamily::hr_compressible, "hr_compressible"},
    {MetricFamily::axisym_swirlfree_3d, "axisym_swirlfree_3d"},
    {MetricFamily::symplectic_2k, "symplectic_2k"},
}};

}  // namespace

std::string_view to_string(MetricFamily f) {
  for (const auto& [k, v] : kNames)
    if (k == f) return v;
  return "unknown";
}

MetricFamily parse_family(std::string_view name) {
  for (const auto& [k, v] : kNames)
    if (v == name) return k;
  throw Error(ErrorKind::Config, "unknown metric family '" + std::string(name) + "'");
}

int MetricConfig::grid_dim() const noexcept {
  switch (family) {
    case MetricFamily::hr_compressible:
      return space_dim;
    case MetricFamily::axisym_swirlfree_3d:
      return 3;
    case MetricFamily::symplectic_2k:
      return 2 * symplectic_k;
    default:
      return 2;
  }
}

void validate(const MetricConfig& c) {
  validate(c.inertia);
  if (!(c.lambda_reg > 0.0)) throw Error(ErrorKind::Config, "lambda_reg must be positive");
  const bool l2 = c.family == MetricFamily::l2_incompressible_2d || c.family == MetricFamily::axisym_swirlfree_3d ||
                  c.family == MetricFamily::symplectic_2k;
  if (l2 && !c.inertia.is_identity()) {
    throw Error(ErrorKind::Config, std::string(to_string(c.family)) + " is an L2 family; inertia order must be 0");
  }
  if (c.family == MetricFamily::hr_incompressible_2d && c.inertia.is_identity()) {
    throw Error(ErrorKind::Config, "hr_incompressible_2d needs inertia order >= 1");
  }
  if (c.family == MetricFamily::hr_compressible) {
    if (c.space_dim != 1 && c.space_dim != 2) throw Error(ErrorKind::Config, "hr_compressible needs space_dim 1 or 2");
    if (c.inertia.is_identity() && c.space_dim != 1) {
      throw Error(ErrorKind::Config, "hr_compressible with inertia order 0 is only allowed in one dimension");
    }
  }
  if (c.family == MetricFamily::axisym_swirlfree_3d && (c.killing_axis < 0 || c.killing_axis > 2)) {
    throw Error(ErrorKind::Config, "killing_axis must be 0, 1 or 2");
  }
  if (c.family == MetricFamily::symplectic_2k && c.symplectic_k != 1 && c.symplectic_k != 2) {
    throw Error(ErrorKind::Config, "symplectic_k must be 1 or 2");
  }
}

}  // namespace torusflow
