#include "qfluct/error.hpp"

namespace qfluct {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::NonFiniteBeta: return "NonFiniteBeta";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::BadRank: return "BadRank";
    case ErrorKind::SupportEmpty: return "SupportEmpty";
    case ErrorKind::OffSupport: return "OffSupport";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::CheckFailed: return "CheckFailed";
  }
  return "Unknown";
}

}  // namespace qfluct
