// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "torusflow/harness/config.hpp"

#include <string>
#include <vector>

namespace torusflow::harness {

/// Built-in experiment: a command plus a config carrying its own acceptance bounds.
struct Preset {
  std::string name;
  std::string command;
  std::string summary;
  Json config;
};

const std::vector<Preset>& presets();
/// Throws Config for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace torusflow::harness
