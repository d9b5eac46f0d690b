#include "qfluct/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "qfluct/error.hpp"
#include "qfluct/sampler.hpp"

namespace qfluct {

using nlohmann::json;

namespace presets {

ComplexMatrix superposed_toffoli_input() {
  const ComplexVector psi = ComplexVector::Constant(4, 0.5);
  ComplexVector zero = ComplexVector::Zero(2);
  zero[0] = 1.0;
  return kron(psi * psi.adjoint(), zero * zero.adjoint());
}

ComplexMatrix bell(Eigen::Index d) {
  ComplexVector v = ComplexVector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) v[k * d + k] = 1.0 / std::sqrt(static_cast<double>(d));
  return v * v.adjoint();
}

ComplexMatrix werner(Eigen::Index d, double p) {
  const auto n = static_cast<double>(d * d);
  return p * bell(d) + (1.0 - p) * ComplexMatrix::Identity(d * d, d * d) / n;
}

ComplexMatrix classical_correlated(Eigen::Index d) {
  ComplexMatrix m = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index k = 0; k < d; ++k) m(k * d + k, k * d + k) = 1.0 / static_cast<double>(d);
  return m;
}

ComplexMatrix product_mixed(const std::vector<double>& p_a, const std::vector<double>& p_b) {
  auto diag = [](const std::vector<double>& p) {
    double total = 0.0;
    for (double v : p) total += v;
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i] / total;
    return m;
  };
  return kron(diag(p_a), diag(p_b));
}

ComplexMatrix toffoli(Eigen::Index d_r) {
  const int perm[] = {0, 1, 2, 3, 4, 5, 7, 6};
  return kron(permutation_matrix(perm), ComplexMatrix::Identity(d_r, d_r));
}

ComplexMatrix partial_swap(Eigen::Index d_a, Eigen::Index d_b, Eigen::Index d_r, Subsystem with, double angle) {
  const Eigen::Index n = d_a * d_b * d_r;
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < d_a; ++a) {
    for (Eigen::Index b = 0; b < d_b; ++b) {
      for (Eigen::Index r = 0; r < d_r; ++r) {
        const Eigen::Index from = (a * d_b + b) * d_r + r;
        const Eigen::Index to = with == Subsystem::A ? (r * d_b + b) * d_r + a : (a * d_b + r) * d_r + b;
        perm[static_cast<std::size_t>(from)] = static_cast<int>(to);
      }
    }
  }
  // SWAP^2 = I, so exp(-i t SWAP) = cos t I - i sin t SWAP.
  return std::cos(angle) * ComplexMatrix::Identity(n, n) - Complex(0.0, std::sin(angle)) * permutation_matrix(perm);
}

json catalog() {
  return json{
      {"initial_state",
       {"bell", "werner{p}", "classical-correlated", "superposed-toffoli-input", "product-mixed{p_A,p_B}",
        "random{seed,rank}", "matrix"}},
      {"H_R", {"zero", "ladder{spacing}", "diagonal"}},
      {"U", {"identity", "toffoli", "swap_AR{angle}", "swap_BR{angle}", "haar{seed}", "permutation{perm}", "matrix"}},
      {"mode", {"exact", "sample{n,seed}"}},
      {"checks", known_checks()},
  };
}

}  // namespace presets

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

void require(bool condition, const std::string& what) {
  if (!condition) invalid(what);
}

ComplexMatrix parse_matrix(const json& rows, const std::string& field) {
  require(rows.is_array() && !rows.empty(), field + ": matrix must be a non-empty array of rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
  ComplexMatrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == n_cols, field + ": ragged matrix");
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (e.is_number()) {
        m(i, j) = e.get<double>();
      } else {
        require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                field + ": entries must be numbers or [re, im] pairs");
        m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
  }
  require(all_finite(m), field + ": non-finite entry");
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> geometric_weights(Eigen::Index d) {
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::ldexp(1.0, -static_cast<int>(k));
  return p;
}

std::vector<double> probability_list(const json& node, const char* key, Eigen::Index d) {
  if (!node.contains(key)) return geometric_weights(d);
  auto p = node.at(key).get<std::vector<double>>();
  require(static_cast<Eigen::Index>(p.size()) == d, std::string("product-mixed: ") + key + " has wrong length");
  double total = 0.0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0.0, std::string("product-mixed: ") + key + " must be nonnegative");
    total += v;
  }
  require(total > 0.0, std::string("product-mixed: ") + key + " sums to zero");
  return p;
}

ComplexMatrix expand_state(const json& node, Eigen::Index d_a, Eigen::Index d_b) {
  require(node.is_object(), "initial_state must be an object");
  if (node.contains("matrix")) return parse_matrix(node.at("matrix"), "initial_state");
  require(node.contains("preset"), "initial_state needs 'preset' or 'matrix'");
  const std::string preset = node.at("preset").get<std::string>();
  if (preset == "superposed-toffoli-input") {
    require(d_a == 4 && d_b == 2, "superposed-toffoli-input needs d_A = 4, d_B = 2");
    return presets::superposed_toffoli_input();
  }
  if (preset == "bell" || preset == "werner" || preset == "classical-correlated") {
    require(d_a == d_b, preset + " needs d_A = d_B");
    if (preset == "bell") return presets::bell(d_a);
    if (preset == "classical-correlated") return presets::classical_correlated(d_a);
    const double p = node.value("p", 1.0);
    require(p >= 0.0 && p <= 1.0, "werner: p must lie in [0, 1]");
    return presets::werner(d_a, p);
  }
  if (preset == "product-mixed") {
    return presets::product_mixed(probability_list(node, "p_A", d_a), probability_list(node, "p_B", d_b));
  }
  if (preset == "random") {
    const auto rank = node.value("rank", static_cast<Eigen::Index>(d_a * d_b));
    require(rank >= 1 && rank <= d_a * d_b, "random: rank must lie in [1, d_A*d_B]");
    return random_density(d_a * d_b, rank, node.value("seed", std::uint64_t{0})).matrix();
  }
  invalid("unknown initial_state preset '" + preset + "'");
}

RealVector expand_energies(const json& doc, Eigen::Index d_r) {
  if (!doc.contains("H_R")) return RealVector::Zero(d_r);
  const json& node = doc.at("H_R");
  require(node.is_object(), "H_R must be an object");
  if (node.contains("diagonal")) {
    const auto e = node.at("diagonal").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(e.size()) == d_r, "H_R: diagonal length must equal d_R");
    RealVector out(d_r);
    for (Eigen::Index r = 0; r < d_r; ++r) {
      require(std::isfinite(e[static_cast<std::size_t>(r)]), "H_R: non-finite energy");
      out[r] = e[static_cast<std::size_t>(r)];
    }
    return out;
  }
  const std::string preset = node.value("preset", std::string("zero"));
  if (preset == "zero") return RealVector::Zero(d_r);
  if (preset == "ladder") {
    const double spacing = node.value("spacing", 1.0);
    RealVector out(d_r);
    for (Eigen::Index r = 0; r < d_r; ++r) out[r] = spacing * static_cast<double>(r);
    return out;
  }
  invalid("unknown H_R preset '" + preset + "'");
}

ComplexMatrix expand_unitary(const json& node, Eigen::Index d_a, Eigen::Index d_b, Eigen::Index d_r) {
  require(node.is_object(), "U must be an object");
  const Eigen::Index n = d_a * d_b * d_r;
  if (node.contains("matrix")) return parse_matrix(node.at("matrix"), "U");
  require(node.contains("preset"), "U needs 'preset' or 'matrix'");
  const std::string preset = node.at("preset").get<std::string>();
  if (preset == "identity") return ComplexMatrix::Identity(n, n);
  if (preset == "toffoli") {
    require(d_a == 4 && d_b == 2, "toffoli needs d_A = 4 (two control qubits), d_B = 2");
    return presets::toffoli(d_r);
  }
  if (preset == "swap_AR") {
    require(d_a == d_r, "swap_AR needs d_A = d_R");
    return presets::partial_swap(d_a, d_b, d_r, Subsystem::A, node.value("angle", std::acos(0.0)));
  }
  if (preset == "swap_BR") {
    require(d_b == d_r, "swap_BR needs d_B = d_R");
    return presets::partial_swap(d_a, d_b, d_r, Subsystem::B, node.value("angle", std::acos(0.0)));
  }
  if (preset == "haar") return random_unitary(n, node.value("seed", std::uint64_t{0}));
  if (preset == "permutation") {
    const auto perm = node.at("perm").get<std::vector<int>>();
    require(static_cast<Eigen::Index>(perm.size()) == n, "permutation: length must equal d_A*d_B*d_R");
    return permutation_matrix(perm);
  }
  invalid("unknown U preset '" + preset + "'");
}

ModeConfig parse_mode(const json& doc) {
  ModeConfig mode;
  if (!doc.contains("mode")) return mode;
  const json& node = doc.at("mode");
  const std::string kind = node.is_string() ? node.get<std::string>() : node.value("kind", std::string("exact"));
  if (kind == "exact") return mode;
  require(kind == "sample", "mode must be 'exact' or 'sample'");
  mode.kind = Mode::Sampled;
  if (node.is_object()) {
    mode.samples = node.value("n", mode.samples);
    mode.seed = node.value("seed", mode.seed);
  }
  require(mode.samples >= 2, "sample mode needs n >= 2");
  return mode;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "ift",       "crooks",           "inequality",         "kl_identity",        "average_identities",
      "normalization", "microreversibility", "landauer_classical", "landauer_quantum", "classical_reduction"};
  return names;
}

const std::vector<std::string>& default_checks() {
  static const std::vector<std::string> names{"ift",         "crooks",        "inequality",
                                              "kl_identity", "average_identities", "normalization"};
  return names;
}

ScenarioConfig parse_config(const json& doc) {
  try {
    require(doc.is_object(), "config must be a JSON object");
    ScenarioConfig c;
    c.name = doc.value("name", std::string("scenario"));
    c.d_a = doc.at("d_A").get<Eigen::Index>();
    c.d_b = doc.at("d_B").get<Eigen::Index>();
    c.d_r = doc.value("d_R", Eigen::Index{1});
    require(c.d_a >= 1 && c.d_b >= 1 && c.d_r >= 1, "dimensions must be positive");
    require(c.d_a * c.d_b * c.d_r <= 256, "total dimension above 256 is not supported");
    c.beta = doc.value("beta", 1.0);
    require(std::isfinite(c.beta) && c.beta >= 0.0, "beta must be finite and >= 0");

    c.initial_state = expand_state(doc.at("initial_state"), c.d_a, c.d_b);
    require(c.initial_state.rows() == c.d_a * c.d_b && c.initial_state.cols() == c.d_a * c.d_b,
            "initial_state must be (d_A*d_B) x (d_A*d_B)");
    c.reservoir_energies = expand_energies(doc, c.d_r);
    c.unitary = expand_unitary(doc.at("U"), c.d_a, c.d_b, c.d_r);
    const Eigen::Index n = c.d_a * c.d_b * c.d_r;
    require(c.unitary.rows() == n && c.unitary.cols() == n, "U must be (d_A*d_B*d_R) x (d_A*d_B*d_R)");
    c.mode = parse_mode(doc);

    c.checks = doc.contains("checks") ? doc.at("checks").get<std::vector<std::string>>() : default_checks();
    for (const std::string& name : c.checks) {
      require(std::find(known_checks().begin(), known_checks().end(), name) != known_checks().end(),
              "unknown check '" + name + "'");
    }
    return c;
  } catch (const json::exception& e) {
    invalid(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    invalid(e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json serialize_config(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["d_A"] = c.d_a;
  doc["d_B"] = c.d_b;
  doc["d_R"] = c.d_r;
  doc["beta"] = c.beta;
  doc["initial_state"] = json{{"matrix", matrix_to_json(c.initial_state)}};
  doc["H_R"] = json{{"diagonal", std::vector<double>(c.reservoir_energies.begin(), c.reservoir_energies.end())}};
  doc["U"] = json{{"matrix", matrix_to_json(c.unitary)}};
  if (c.mode.kind == Mode::Exact) {
    doc["mode"] = json{{"kind", "exact"}};
  } else {
    doc["mode"] = json{{"kind", "sample"}, {"n", c.mode.samples}, {"seed", c.mode.seed}};
  }
  doc["checks"] = c.checks;
  return doc;
}

ProcessSpec to_process_spec(const ScenarioConfig& c, const Tolerances& tol) {
  try {
    BipartiteState state = make_bipartite(c.initial_state, c.d_a, c.d_b, tol);
    const ComplexMatrix h = c.reservoir_energies.cast<Complex>().asDiagonal();
    return make_process_spec(std::move(state), h, c.beta, c.unitary, tol);
  } catch (const Error& e) {
    invalid(c.name + ": " + e.what());
  }
}

bool ScenarioResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

CheckResult at_most(std::string name, double value, double tolerance) {
  return CheckResult{std::move(name), value, tolerance, value <= tolerance, {}};
}

CheckResult at_least(std::string name, double value, double tolerance) {
  return CheckResult{std::move(name), value, tolerance, value >= -tolerance, {}};
}

// Worst |estimate - target| / (k * standard error); passes at <= 1.
CheckResult within_errors(std::string name, std::initializer_list<std::array<double, 3>> items, double sigmas) {
  double worst = 0.0;
  for (const auto& [estimate, target, se] : items) {
    const double window = sigmas * se + 1e-12;
    worst = std::max(worst, std::abs(estimate - target) / window);
  }
  return CheckResult{std::move(name), worst, 1.0, worst <= 1.0, "ratio of deviation to the standard-error window"};
}

CheckResult landauer(const EnsembleReport& r, LandauerMode mode, const Tolerances& tol) {
  const std::string name = std::string("landauer_") + to_string(mode);
  try {
    CheckResult c = at_least(name, landauer_check(r, mode, tol), tol.theorem);
    c.detail = "bound on beta<Q> = " + format_double(landauer_bound(r, mode));
    return c;
  } catch (const Error& e) {
    return CheckResult{name, r.avg_ds_b, tol.assumption, false, e.what()};
  }
}

std::vector<CheckResult> exact_checks(const ScenarioConfig& c, const MeasurementFrame& frame,
                                      const EnsembleReport& r, const Tolerances& tol) {
  std::vector<CheckResult> out;
  for (const std::string& name : c.checks) {
    if (name == "ift") {
      CheckResult check = at_most(name, std::abs(r.ift_value - 1.0), tol.theorem);
      if (r.reverse_mass_off_support > tol.theorem) {
        check.detail = "reverse weight outside the forward support = " + format_double(r.reverse_mass_off_support);
      }
      out.push_back(std::move(check));
    } else if (name == "crooks") {
      out.push_back(at_most(name, r.crooks_max_relative_residual, tol.theorem));
    } else if (name == "inequality") {
      out.push_back(at_least(name, r.inequality_slack, tol.theorem));
    } else if (name == "kl_identity") {
      const double mismatch = std::abs(r.inequality_slack - r.kl_divergence);
      CheckResult check = at_most(name, mismatch, tol.theorem);
      check.passed = check.passed && r.kl_divergence >= -tol.negative_eigenvalue;
      out.push_back(std::move(check));
    } else if (name == "average_identities") {
      out.push_back(at_most(name, average_identity_residuals(r).max(), tol.theorem));
    } else if (name == "normalization") {
      out.push_back(at_most(name, std::max(std::abs(r.forward_mass - 1.0), std::abs(r.reverse_mass - 1.0)),
                            tol.normalization));
    } else if (name == "microreversibility") {
      const TransitionKernel fwd = transition_kernel(frame, frame.unitary);
      const TransitionKernel rev = reverse_kernel_via_time_reversal(frame);
      double worst = 0.0;
      for (std::size_t i = 0; i < fwd.values().size(); ++i)
        worst = std::max(worst, std::abs(fwd.values()[i] - rev.values()[i]));
      out.push_back(at_most(name, worst, 1e-12));
    } else if (name == "landauer_classical") {
      out.push_back(landauer(r, LandauerMode::Classical, tol));
    } else if (name == "landauer_quantum") {
      out.push_back(landauer(r, LandauerMode::Quantum, tol));
    } else if (name == "classical_reduction") {
      const double ift_dev = std::abs(r.ift_classical - 1.0);
      CheckResult check = at_most(name, r.max_abs_di_minus_dj, 1e-10);
      check.passed = check.passed && ift_dev <= tol.theorem;
      check.detail = "|<e^(-sigma_J)> - 1| = " + format_double(ift_dev);
      out.push_back(std::move(check));
    }
  }
  return out;
}

std::vector<CheckResult> sampled_checks(const ScenarioConfig& c, const EnsembleReport& r, const Tolerances& tol) {
  std::vector<CheckResult> out;
  const StandardErrors& se = *r.standard_errors;
  const StateFunctionals& f = r.functionals;
  const double k = tol.sampler_sigmas;
  for (const std::string& name : c.checks) {
    if (name == "ift") {
      out.push_back(within_errors(name, {{r.ift_value, 1.0, se.ift}}, k));
    } else if (name == "crooks") {
      out.push_back(at_most(name, r.crooks_max_relative_residual, tol.theorem));
    } else if (name == "inequality") {
      out.push_back(at_least(name, r.inequality_slack + k * se.sigma, tol.theorem));
    } else if (name == "kl_identity") {
      out.push_back(at_most(name, std::abs(r.inequality_slack - r.kl_divergence), tol.theorem));
    } else if (name == "average_identities") {
      out.push_back(within_errors(name,
                                  {{r.avg_ds_a, f.s_a_final - f.s_a_initial, se.ds_a},
                                   {r.avg_ds_b, f.s_b_final - f.s_b_initial, se.ds_b},
                                   {r.avg_di, f.mutual_information_final - f.mutual_information_initial, se.di},
                                   {r.avg_dj, f.classical_mi_final - f.classical_mi_initial, se.dj}},
                                  k));
    } else if (name == "landauer_classical") {
      out.push_back(landauer(r, LandauerMode::Classical, tol));
    } else if (name == "landauer_quantum") {
      out.push_back(landauer(r, LandauerMode::Quantum, tol));
    } else {
      out.push_back(CheckResult{name, 0.0, 0.0, true, "exact-mode check, skipped when sampling"});
    }
  }
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const Tolerances tol = tolerances_for(options.profile);
  const ProcessSpec spec = to_process_spec(config, tol);
  ScenarioResult result;
  result.frame = evolve(spec, {}, tol);
  const MeasurementFrame& frame = *result.frame;
  if (config.mode.kind == Mode::Exact) {
    std::vector<Trajectory> traj = enumerate_trajectories(frame, Enumeration::Support, options.workers);
    result.report = analyze(frame, traj, options.workers);
    result.checks = exact_checks(config, frame, result.report, tol);
    if (options.keep_trajectories) result.trajectories = std::move(traj);
  } else {
    result.report = estimate_report(frame, config.mode.samples, config.mode.seed, options.workers);
    result.checks = sampled_checks(config, result.report, tol);
  }
  return result;
}

ProcessSpec sweep_instance(const SweepOptions& o, std::size_t index) {
  const Eigen::Index d_ab = o.d_a * o.d_b;
  const Eigen::Index rank = o.rank.value_or(d_ab);
  std::mt19937_64 rng = substream(o.seed, index);
  const DensityOperator rho = random_density(d_ab, rank, rng);
  std::uniform_real_distribution<double> energy(0.0, 2.0);
  ComplexMatrix h = ComplexMatrix::Zero(o.d_r, o.d_r);
  for (Eigen::Index r = 0; r < o.d_r; ++r) h(r, r) = energy(rng);
  const ComplexMatrix u = random_unitary(d_ab * o.d_r, rng);
  const double beta = o.betas[index % o.betas.size()];
  return make_process_spec(make_bipartite(rho.matrix(), o.d_a, o.d_b), h, beta, u);
}

SweepSummary run_sweep(const SweepOptions& o) {
  require(o.n_instances >= 1, "sweep needs n >= 1");
  require(o.d_a >= 1 && o.d_b >= 1 && o.d_r >= 1, "sweep dimensions must be positive");
  require(!o.betas.empty(), "sweep needs at least one beta");
  for (double b : o.betas) require(std::isfinite(b) && b >= 0.0, "sweep betas must be finite and >= 0");
  if (o.rank) require(*o.rank >= 1 && *o.rank <= o.d_a * o.d_b, "sweep rank must lie in [1, d_A*d_B]");

  const Tolerances tol = tolerances_for(o.profile);
  SweepSummary summary;
  summary.min_inequality_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < o.n_instances; ++i) {
    const ProcessSpec spec = sweep_instance(o, i);
    const MeasurementFrame frame = evolve(spec, {}, tol);
    const std::vector<Trajectory> traj = enumerate_trajectories(frame, Enumeration::Support, o.workers);
    const EnsembleReport r = analyze(frame, traj, o.workers);

    SweepRow row;
    row.index = i;
    row.rank = o.rank.value_or(o.d_a * o.d_b);
    row.beta = spec.beta;
    row.ift_deviation = std::abs(r.ift_value - 1.0);
    row.crooks_residual = r.crooks_max_relative_residual;
    row.inequality_slack = r.inequality_slack;
    row.kl_mismatch = std::abs(r.inequality_slack - r.kl_divergence);
    row.average_residual = average_identity_residuals(r).max();
    row.reverse_mass_off_support = r.reverse_mass_off_support;
    row.passed = row.ift_deviation <= tol.theorem && row.crooks_residual <= tol.theorem &&
                 row.inequality_slack >= -tol.theorem && row.kl_mismatch <= tol.theorem &&
                 row.average_residual <= tol.theorem;

    summary.worst_ift_deviation = std::max(summary.worst_ift_deviation, row.ift_deviation);
    summary.worst_crooks_residual = std::max(summary.worst_crooks_residual, row.crooks_residual);
    summary.min_inequality_slack = std::min(summary.min_inequality_slack, row.inequality_slack);
    summary.worst_kl_mismatch = std::max(summary.worst_kl_mismatch, row.kl_mismatch);
    summary.worst_average_residual = std::max(summary.worst_average_residual, row.average_residual);
    if (!row.passed) ++summary.violations;
    summary.rows.push_back(row);
  }
  return summary;
}

}  // namespace qfluct
