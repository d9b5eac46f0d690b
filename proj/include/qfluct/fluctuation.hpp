#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfluct/protocol.hpp"

namespace qfluct {

/// Per-trajectory increments, all in nats (beta_q dimensionless).
struct StochasticIncrements {
  double ds_a = 0.0;
  double ds_b = 0.0;
  double di = 0.0;
  double dj = 0.0;
  double beta_q = 0.0;

  /// ds_A + ds_B - dI - beta Q; the IFT exponent is -sigma().
  double sigma() const { return ds_a + ds_b - di - beta_q; }
  /// Same with the classical mutual information change dJ in place of dI.
  double sigma_classical() const { return ds_a + ds_b - dj - beta_q; }
};

/// Precomputes log-populations of a frame so increments are cheap per trajectory.
class IncrementCalculator {
 public:
  explicit IncrementCalculator(const MeasurementFrame& frame);

  /// Increments of a trajectory with p_forward above the support threshold;
  /// throws OffSupport otherwise.
  StochasticIncrements operator()(const Trajectory& traj) const;

  /// Same, without the p_forward check. Throws OffSupport if any increment is
  /// not finite (a population on the path is zero).
  StochasticIncrements unchecked(const Trajectory& traj) const;

 private:
  std::vector<double> log_pm_, log_pa_, log_pb_;
  std::vector<double> log_pm_f_, log_pa_f_, log_pb_f_;
  std::vector<double> log_pab_, log_pab_f_;
  std::vector<double> energy_;
  double beta_;
  double threshold_;
  Eigen::Index d_b_;
};

StochasticIncrements increments(const Trajectory& traj, const MeasurementFrame& frame);

enum class Mode { Exact, Sampled };

struct StandardErrors {
  double ift = 0.0;
  double ds_a = 0.0;
  double ds_b = 0.0;
  double di = 0.0;
  double dj = 0.0;
  double beta_q = 0.0;
  double sigma = 0.0;
};

/// Entropic functionals of the density operators at both times.
struct StateFunctionals {
  double s_a_initial, s_b_initial, s_ab_initial;
  double s_a_final, s_b_final, s_ab_final;
  double mutual_information_initial, mutual_information_final;
  double classical_mi_initial, classical_mi_final;
  double information_content_initial, information_content_final;
};

StateFunctionals state_functionals(const MeasurementFrame& frame);

struct EnsembleReport {
  Mode mode = Mode::Exact;
  double ift_value = 0.0;            ///< <e^{-ds_A-ds_B+dI+betaQ}>
  double ift_classical = 0.0;        ///< <e^{-ds_A-ds_B+dJ+betaQ}>
  double avg_ds_a = 0.0;
  double avg_ds_b = 0.0;
  double avg_di = 0.0;
  double avg_dj = 0.0;
  double avg_beta_q = 0.0;
  double inequality_slack = 0.0;     ///< <ds_A> + <ds_B> - <dI> - beta<Q>
  double kl_divergence = 0.0;        ///< sum p ln(p / p~) over the forward support
  double crooks_max_relative_residual = 0.0;
  double max_abs_di_minus_dj = 0.0;
  double max_abs_exponent = 0.0;
  double forward_mass = 0.0;
  double reverse_mass = 0.0;         ///< total reverse weight over the enumerated set
  double reverse_mass_off_support = 0.0;  ///< reverse weight where p_forward is zero
  std::size_t support_size = 0;
  std::size_t n_samples = 0;
  std::optional<StandardErrors> standard_errors;
  StateFunctionals functionals{};
};

/// Exact-mode report over an enumerated ensemble (both distributions filled).
/// Reductions use fixed-size blocks combined in order, so the result does not
/// depend on `workers`.
EnsembleReport analyze(const MeasurementFrame& frame, std::span<const Trajectory> trajectories,
                       std::size_t workers = 1);

/// sum p_forward e^{-ds_A-ds_B+dI+betaQ} over supported trajectories.
double integral_ft(std::span<const Trajectory> distribution, const MeasurementFrame& frame);

/// Max over supported trajectories of |p~/p - e^{-sigma}| / (p~/p).
double crooks_check(std::span<const Trajectory> trajectories, const MeasurementFrame& frame);

/// sum p ln(p/p~) over supported trajectories.
double kl_divergence(std::span<const Trajectory> trajectories, const Tolerances& tol = {});

/// <ds_A> + <ds_B> - <dI> - beta<Q>.
double inequality_check(const EnsembleReport& report);

enum class LandauerMode { Classical, Quantum };

/// <ds_A> - <dJ> - beta<Q> (classical) or <ds_A> - <dI> - beta<Q> (quantum).
/// Requires <ds_B> = 0 within tol.assumption; throws AssumptionViolated otherwise.
double landauer_check(const EnsembleReport& report, LandauerMode mode, const Tolerances& tol = {});

/// Bound on beta<Q> in the Landauer modes: <ds_A> - <dJ> or <ds_A> - <dI>.
double landauer_bound(const EnsembleReport& report, LandauerMode mode);

/// |trajectory average - density-operator functional| for each identity.
struct AverageIdentityResiduals {
  double ds_a;
  double ds_b;
  double di;
  double dj;

  double max() const;
};

AverageIdentityResiduals average_identity_residuals(const EnsembleReport& report);

const char* to_string(Mode mode) noexcept;
const char* to_string(LandauerMode mode) noexcept;

}  // namespace qfluct
