#pragma once

#include <stdexcept>
#include <string>

namespace qfluct {

enum class ErrorKind {
  NotSquare,
  NotHermitian,
  DimensionMismatch,
  NonFinite,
  TraceNotOne,
  NegativeEigenvalue,
  NonFiniteBeta,
  NotUnitary,
  BadRank,
  SupportEmpty,
  OffSupport,
  AssumptionViolated,
  ConfigInvalid,
  CheckFailed,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qfluct
