// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/error.hpp"

#include <cstddef>
#include <vector>

namespace torusflow {

/// Quadrature weights for equally spaced samples with spacing h.
///
/// Composite Simpson for an even number of intervals. For an odd number the
/// last three intervals use the 3/8 rule. Two samples fall back to the
/// trapezoid rule.
std::vector<double> simpson_weights(std::size_t samples, double h);

/// Σ w_k f_k for any type with scalar multiplication and addition.
template <class T>
T integrate_samples(const std::vector<T>& f, double h) {
  const auto w = simpson_weights(f.size(), h);
  T acc = w[0] * f[0];
  for (std::size_t k = 1; k < f.size(); ++k) acc += w[k] * f[k];
  return acc;
}

}  // namespace torusflow
