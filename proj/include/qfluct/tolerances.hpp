#pragma once

namespace qfluct {

// Every numerical threshold in the library lives here.
struct Tolerances {
  double hermiticity = 1e-12;        // max |M - M^dagger| entry
  double reconstruction = 1e-10;     // relative Frobenius error of V diag(l) V^dagger
  double probability_clip = 1e-14;   // eigenvalues and trajectory weights at or below are zero
  double trace = 1e-10;
  double negative_eigenvalue = 1e-10;
  double unitarity = 1e-10;
  double degeneracy = 1e-10;         // relative eigenvalue gap that merges a cluster
  double theorem = 1e-9;             // IFT, Crooks, KL identity, averages
  double normalization = 1e-9;
  double assumption = 1e-9;          // <ds_B> = 0 for the Landauer modes
  double sampler_sigmas = 5.0;
};

enum class ToleranceProfile { Default, Strict };

Tolerances tolerances_for(ToleranceProfile profile);

// Reads QFLUCT_TOL (strict|default). Unset or empty means default; anything
// else is a configuration error.
ToleranceProfile profile_from_env();

const char* to_string(ToleranceProfile profile) noexcept;

}  // namespace qfluct
