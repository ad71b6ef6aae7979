// SPDX-License-Identifier: Apache-2.0
#include "torusflow/quadrature.hpp"

namespace torusflow {

std::vector<double> simpson_weights(std::size_t samples, double h) {
  if (samples < 2) throw Error(ErrorKind::TooFewCheckpoints, "quadrature needs at least two samples");
  std::vector<double> w(samples, 0.0);
  const std::size_t intervals = samples - 1;
  if (intervals == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  std::size_t simpson_end = intervals;
  if (intervals % 2 == 1) {
    simpson_end = intervals - 3;
    const double c = 3.0 * h / 8.0;
    w[simpson_end] += c;
    w[simpson_end + 1] += 3.0 * c;
    w[simpson_end + 2] += 3.0 * c;
    w[simpson_end + 3] += c;
  }
  for (std::size_t i = 0; i < simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  return w;
}

}  // namespace torusflow
