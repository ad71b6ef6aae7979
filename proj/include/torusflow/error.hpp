// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torusflow {

enum class ErrorKind {
  InvalidArgument,
  AxisOutOfRange,
  WrongDimension,
  GridMismatch,
  NonZeroMean,
  CflViolation,
  NonInvertible,
  NoConvergence,
  NotDivergenceFree,
  NotAxisymmetric,
  NonZeroSwirl,
  NotSymplecticField,
  ResolutionTooHigh,
  TooFewCheckpoints,
  ZeroField,
  NotConverged,
  BasinGuard,
  FamilyMismatch,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace torusflow
