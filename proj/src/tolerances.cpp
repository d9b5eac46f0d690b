#include "qfluct/tolerances.hpp"

#include <cstdlib>
#include <string>

#include "qfluct/error.hpp"

namespace qfluct {

Tolerances tolerances_for(ToleranceProfile profile) {
  Tolerances tol;
  if (profile == ToleranceProfile::Strict) {
    tol.theorem = 1e-11;
    tol.normalization = 1e-11;
    tol.assumption = 1e-11;
  }
  return tol;
}

ToleranceProfile profile_from_env() {
  const char* raw = std::getenv("QFLUCT_TOL");
  if (raw == nullptr) return ToleranceProfile::Default;
  const std::string value(raw);
  if (value.empty() || value == "default") return ToleranceProfile::Default;
  if (value == "strict") return ToleranceProfile::Strict;
  throw Error(ErrorKind::ConfigInvalid, "QFLUCT_TOL must be 'strict' or 'default', got '" + value + "'");
}

const char* to_string(ToleranceProfile profile) noexcept {
  return profile == ToleranceProfile::Strict ? "strict" : "default";
}

}  // namespace qfluct
