// SPDX-License-Identifier: Apache-2.0
#include "torusflow/error.hpp"

namespace torusflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonZeroMean: return "NonZeroMean";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::NonInvertible: return "NonInvertible";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotDivergenceFree: return "NotDivergenceFree";
    case ErrorKind::NotAxisymmetric: return "NotAxisymmetric";
    case ErrorKind::NonZeroSwirl: return "NonZeroSwirl";
    case ErrorKind::NotSymplecticField: return "NotSymplecticField";
    case ErrorKind::ResolutionTooHigh: return "ResolutionTooHigh";
    case ErrorKind::TooFewCheckpoints: return "TooFewCheckpoints";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::BasinGuard: return "BasinGuard";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace torusflow
