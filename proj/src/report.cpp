#include <array>
#include <charconv>
#include <cmath>

#include "qfluct/scenario.hpp"

namespace qfluct {

using nlohmann::json;

const char* version() noexcept { return QFLUCT_VERSION; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

// JSON has no representation for non-finite numbers.
json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json report_fields(const EnsembleReport& r) {
  json out{
      {"ift_value", number(r.ift_value)},
      {"ift_classical", number(r.ift_classical)},
      {"avg_ds_A", number(r.avg_ds_a)},
      {"avg_ds_B", number(r.avg_ds_b)},
      {"avg_dI", number(r.avg_di)},
      {"avg_dJ", number(r.avg_dj)},
      {"avg_betaQ", number(r.avg_beta_q)},
      {"inequality_slack", number(r.inequality_slack)},
      {"kl_divergence", number(r.kl_divergence)},
      {"crooks_max_relative_residual", number(r.crooks_max_relative_residual)},
      {"max_abs_dI_minus_dJ", number(r.max_abs_di_minus_dj)},
      {"max_abs_exponent", number(r.max_abs_exponent)},
      {"forward_mass", number(r.forward_mass)},
      {"reverse_mass", number(r.reverse_mass)},
      {"reverse_mass_off_support", number(r.reverse_mass_off_support)},
      {"support_size", r.support_size},
      {"n_samples", r.n_samples},
  };
  if (r.standard_errors) {
    const StandardErrors& se = *r.standard_errors;
    out["standard_errors"] = json{{"ift", number(se.ift)},   {"ds_A", number(se.ds_a)},
                                  {"ds_B", number(se.ds_b)}, {"dI", number(se.di)},
                                  {"dJ", number(se.dj)},     {"betaQ", number(se.beta_q)},
                                  {"sigma", number(se.sigma)}};
  }
  const StateFunctionals& f = r.functionals;
  out["state_functionals"] = json{
      {"S_A", {f.s_a_initial, f.s_a_final}},
      {"S_B", {f.s_b_initial, f.s_b_final}},
      {"S_AB", {f.s_ab_initial, f.s_ab_final}},
      {"mutual_information", {f.mutual_information_initial, f.mutual_information_final}},
      {"classical_mutual_information", {f.classical_mi_initial, f.classical_mi_final}},
      {"information_content", {f.information_content_initial, f.information_content_final}},
  };
  return out;
}

}  // namespace

json report_to_json(const ScenarioConfig& config, const ScenarioResult& result, ToleranceProfile profile) {
  json provenance{
      {"tool", "qfluct"},
      {"version", version()},
      {"scenario", config.name},
      {"dims", {config.d_a, config.d_b, config.d_r}},
      {"beta", config.beta},
      {"tolerance_profile", to_string(profile)},
      {"mode", to_string(config.mode.kind)},
  };
  if (config.mode.kind == Mode::Sampled) {
    provenance["samples"] = config.mode.samples;
    provenance["seed"] = config.mode.seed;
  }
  json checks = json::array();
  for (const CheckResult& c : result.checks) {
    json entry{{"name", c.name}, {"value", number(c.value)}, {"tolerance", c.tolerance}, {"passed", c.passed}};
    if (!c.detail.empty()) entry["detail"] = c.detail;
    checks.push_back(std::move(entry));
  }
  return json{{"provenance", std::move(provenance)},
              {"report", report_fields(result.report)},
              {"checks", std::move(checks)},
              {"all_passed", result.all_passed()}};
}

json sweep_to_json(const SweepOptions& o, const SweepSummary& s) {
  json rows = json::array();
  for (const SweepRow& r : s.rows) {
    rows.push_back(json{{"index", r.index},
                        {"rank", r.rank},
                        {"beta", r.beta},
                        {"ift_deviation", number(r.ift_deviation)},
                        {"crooks_residual", number(r.crooks_residual)},
                        {"inequality_slack", number(r.inequality_slack)},
                        {"kl_mismatch", number(r.kl_mismatch)},
                        {"average_residual", number(r.average_residual)},
                        {"reverse_mass_off_support", number(r.reverse_mass_off_support)},
                        {"passed", r.passed}});
  }
  json provenance{{"tool", "qfluct"},
                  {"version", version()},
                  {"dims", {o.d_a, o.d_b, o.d_r}},
                  {"betas", o.betas},
                  {"seed", o.seed},
                  {"n", o.n_instances},
                  {"tolerance_profile", to_string(o.profile)}};
  provenance["rank"] = o.rank ? json(*o.rank) : json("full");
  return json{{"provenance", std::move(provenance)},
              {"summary",
               {{"worst_ift_deviation", number(s.worst_ift_deviation)},
                {"worst_crooks_residual", number(s.worst_crooks_residual)},
                {"min_inequality_slack", number(s.min_inequality_slack)},
                {"worst_kl_mismatch", number(s.worst_kl_mismatch)},
                {"worst_average_residual", number(s.worst_average_residual)},
                {"violations", s.violations}}},
              {"instances", std::move(rows)}};
}

void write_trajectory_csv(std::ostream& out, const MeasurementFrame& frame,
                          const std::vector<Trajectory>& trajectories) {
  const IncrementCalculator calc(frame);
  const double clip = frame.tol.probability_clip;
  out << "m,a,b,r,m',a',b',r',p_forward,p_reverse,ds_A,ds_B,dI,dJ,betaQ\n";
  for (const Trajectory& t : trajectories) {
    out << t.m << ',' << t.a << ',' << t.b << ',' << t.r << ',' << t.m_f << ',' << t.a_f << ',' << t.b_f << ','
        << t.r_f << ',' << format_double(t.p_forward) << ',' << format_double(t.p_reverse);
    if (t.p_forward > clip) {
      const StochasticIncrements inc = calc(t);
      for (double v : {inc.ds_a, inc.ds_b, inc.di, inc.dj, inc.beta_q}) out << ',' << format_double(v);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

}  // namespace qfluct
