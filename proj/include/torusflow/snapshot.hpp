// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/field.hpp"

#include <filesystem>
#include <string>

namespace torusflow {

/// Field snapshot container.
///
/// A text header of `key value` lines:
///
///     TFSNAP 1
///     dim <d>
///     n_per_axis <n>
///     components <c>
///     normalization mean-is-coeff0
///     tag <tag>
///     layout component-major row-major float64-le
///     end_header
///
/// followed by c·n^d little-endian doubles, component by component, each in
/// row-major node order (axis 0 slowest).
struct Snapshot {
  std::string tag;
  VectorField field;
};

void write_snapshot(const std::filesystem::path& path, const VectorField& field, const std::string& tag);
void write_snapshot(const std::filesystem::path& path, const ScalarField& field, const std::string& tag);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace torusflow
