#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfluct/fluctuation.hpp"
#include "qfluct/protocol.hpp"
#include "qfluct/tolerances.hpp"

namespace qfluct {

namespace presets {

/// |Psi> = (|00> + |01> + |10> + |11>)/2 on A, |0> on B (d_A = 4, d_B = 2).
ComplexMatrix superposed_toffoli_input();
/// |Phi+> = sum_k |k,k> / sqrt(d).
ComplexMatrix bell(Eigen::Index d);
/// p |Phi+><Phi+| + (1 - p) I / d^2.
ComplexMatrix werner(Eigen::Index d, double p);
/// sum_k |k,k><k,k| / d.
ComplexMatrix classical_correlated(Eigen::Index d);
/// diag(p_A) (x) diag(p_B), each normalized.
ComplexMatrix product_mixed(const std::vector<double>& p_a, const std::vector<double>& p_b);

/// Toffoli on the two A qubits (controls) and the B qubit (target), times I_R.
ComplexMatrix toffoli(Eigen::Index d_r);
/// exp(-i angle SWAP_XR) on A (x) B (x) R, X = A or B (requires d_X = d_R).
ComplexMatrix partial_swap(Eigen::Index d_a, Eigen::Index d_b, Eigen::Index d_r, Subsystem with, double angle);

/// Names accepted in each preset slot, for `presets list`.
nlohmann::json catalog();

}  // namespace presets

struct ModeConfig {
  Mode kind = Mode::Exact;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

/// A scenario with every preset expanded into literal matrices.
struct ScenarioConfig {
  std::string name;
  Eigen::Index d_a = 0;
  Eigen::Index d_b = 0;
  Eigen::Index d_r = 1;
  double beta = 0.0;
  ComplexMatrix initial_state;
  RealVector reservoir_energies;
  ComplexMatrix unitary;
  ModeConfig mode;
  std::vector<std::string> checks;
};

/// Throws ConfigInvalid on schema or dimension errors.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Literal form: complex matrices as nested [re, im] pairs, H_R as a flat
/// diagonal. parse_config(serialize_config(c)) reproduces c exactly.
nlohmann::json serialize_config(const ScenarioConfig& config);

ProcessSpec to_process_spec(const ScenarioConfig& config, const Tolerances& tol = {});

/// Check names understood by run_scenario.
const std::vector<std::string>& known_checks();
const std::vector<std::string>& default_checks();

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct RunOptions {
  ToleranceProfile profile = ToleranceProfile::Default;
  std::size_t workers = 1;
  bool keep_trajectories = false;
};

struct ScenarioResult {
  EnsembleReport report;
  std::vector<CheckResult> checks;
  std::optional<MeasurementFrame> frame;
  std::vector<Trajectory> trajectories;  ///< exact mode with keep_trajectories

  bool all_passed() const;
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct SweepOptions {
  std::size_t n_instances = 100;
  Eigen::Index d_a = 2;
  Eigen::Index d_b = 2;
  Eigen::Index d_r = 2;
  std::vector<double> betas{1.0};
  std::uint64_t seed = 0;
  std::optional<Eigen::Index> rank;  ///< unset: full rank d_A * d_B
  ToleranceProfile profile = ToleranceProfile::Default;
  std::size_t workers = 1;
};

struct SweepRow {
  std::size_t index = 0;
  Eigen::Index rank = 0;
  double beta = 0.0;
  double ift_deviation = 0.0;
  double crooks_residual = 0.0;
  double inequality_slack = 0.0;
  double kl_mismatch = 0.0;
  double average_residual = 0.0;
  double reverse_mass_off_support = 0.0;
  bool passed = false;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  double worst_ift_deviation = 0.0;
  double worst_crooks_residual = 0.0;
  double min_inequality_slack = 0.0;
  double worst_kl_mismatch = 0.0;
  double worst_average_residual = 0.0;
  std::size_t violations = 0;
};

/// Random instance `index` of a sweep (state, Haar unitary, random energies in [0, 2)).
ProcessSpec sweep_instance(const SweepOptions& options, std::size_t index);

SweepSummary run_sweep(const SweepOptions& options);

// Serialization of results (report.cpp).
nlohmann::json report_to_json(const ScenarioConfig& config, const ScenarioResult& result,
                              ToleranceProfile profile);
nlohmann::json sweep_to_json(const SweepOptions& options, const SweepSummary& summary);

/// Columns m,a,b,r,m',a',b',r',p_forward,p_reverse,ds_A,ds_B,dI,dJ,betaQ; the
/// increment columns are empty off the support. Doubles in shortest round-trip form.
void write_trajectory_csv(std::ostream& out, const MeasurementFrame& frame,
                          const std::vector<Trajectory>& trajectories);

/// Library version recorded in report provenance.
const char* version() noexcept;

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace qfluct
