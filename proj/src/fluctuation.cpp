#include "qfluct/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qfluct/error.hpp"
#include "qfluct/parallel.hpp"

namespace qfluct {

namespace {

std::vector<double> logs(const RealVector& p) {
  std::vector<double> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = std::log(p[i]);
  return out;
}

std::vector<double> logs(const std::vector<double>& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::log(std::max(p[i], 0.0));
  return out;
}

double information_content_average(const BipartiteState& state, const Tolerances& tol) {
  const std::vector<double> joint = consecutive_joint(state);
  const RealVector& ps = state.joint.probabilities();
  const RealVector& pk = state.marginal_a.probabilities();
  const RealVector& pl = state.marginal_b.probabilities();
  const Eigen::Index d_ab = state.d_a * state.d_b;
  double total = 0.0;
  for (Eigen::Index s = 0; s < d_ab; ++s) {
    for (Eigen::Index k = 0; k < state.d_a; ++k) {
      for (Eigen::Index l = 0; l < state.d_b; ++l) {
        const double w = joint[static_cast<std::size_t>(s * d_ab + k * state.d_b + l)];
        if (w <= tol.probability_clip) continue;
        total += w * (std::log(ps[s]) - std::log(pk[k]) - std::log(pl[l]));
      }
    }
  }
  return total;
}

double classical_mutual_information(const BipartiteState& state) {
  const std::vector<double> pab = product_basis_populations(state);
  RealVector joint(static_cast<Eigen::Index>(pab.size()));
  for (std::size_t i = 0; i < pab.size(); ++i) joint[static_cast<Eigen::Index>(i)] = std::max(pab[i], 0.0);
  return shannon_entropy(state.marginal_a.probabilities()) + shannon_entropy(state.marginal_b.probabilities()) -
         shannon_entropy(joint);
}

struct PartialSums {
  double forward_mass = 0.0;
  double reverse_mass = 0.0;
  double reverse_off_support = 0.0;
  double ift = 0.0;
  double ift_classical = 0.0;
  double ds_a = 0.0;
  double ds_b = 0.0;
  double di = 0.0;
  double dj = 0.0;
  double beta_q = 0.0;
  double kl = 0.0;
  double crooks = 0.0;
  double di_dj = 0.0;
  double exponent = 0.0;
  std::size_t support = 0;

  void add(const PartialSums& o) {
    forward_mass += o.forward_mass;
    reverse_mass += o.reverse_mass;
    reverse_off_support += o.reverse_off_support;
    ift += o.ift;
    ift_classical += o.ift_classical;
    ds_a += o.ds_a;
    ds_b += o.ds_b;
    di += o.di;
    dj += o.dj;
    beta_q += o.beta_q;
    kl += o.kl;
    crooks = std::max(crooks, o.crooks);
    di_dj = std::max(di_dj, o.di_dj);
    exponent = std::max(exponent, o.exponent);
    support += o.support;
  }
};

constexpr std::size_t kReductionBlock = 1024;

double crooks_residual(const Trajectory& t, const StochasticIncrements& inc) {
  const double ratio = t.p_reverse / t.p_forward;
  return std::abs(ratio - std::exp(-inc.sigma())) / ratio;
}

}  // namespace

IncrementCalculator::IncrementCalculator(const MeasurementFrame& frame)
    : log_pm_(logs(frame.initial.joint.probabilities())),
      log_pa_(logs(frame.initial.marginal_a.probabilities())),
      log_pb_(logs(frame.initial.marginal_b.probabilities())),
      log_pm_f_(logs(frame.final.joint.probabilities())),
      log_pa_f_(logs(frame.final.marginal_a.probabilities())),
      log_pb_f_(logs(frame.final.marginal_b.probabilities())),
      log_pab_(logs(product_basis_populations(frame.initial))),
      log_pab_f_(logs(product_basis_populations(frame.final))),
      energy_(frame.reservoir.energies.begin(), frame.reservoir.energies.end()),
      beta_(frame.reservoir.beta),
      threshold_(frame.tol.probability_clip),
      d_b_(frame.d_b()) {}

StochasticIncrements IncrementCalculator::unchecked(const Trajectory& t) const {
  const double la = log_pa_[t.a], lb = log_pb_[t.b];
  const double la_f = log_pa_f_[t.a_f], lb_f = log_pb_f_[t.b_f];
  StochasticIncrements inc;
  inc.ds_a = la - la_f;
  inc.ds_b = lb - lb_f;
  inc.di = (log_pm_f_[t.m_f] - la_f - lb_f) - (log_pm_[t.m] - la - lb);
  inc.dj = (log_pab_f_[static_cast<std::size_t>(t.a_f * d_b_ + t.b_f)] - la_f - lb_f) -
           (log_pab_[static_cast<std::size_t>(t.a * d_b_ + t.b)] - la - lb);
  inc.beta_q = beta_ * (energy_[t.r] - energy_[t.r_f]);
  if (!std::isfinite(inc.ds_a) || !std::isfinite(inc.ds_b) || !std::isfinite(inc.di) ||
      !std::isfinite(inc.dj) || !std::isfinite(inc.beta_q)) {
    throw Error(ErrorKind::OffSupport, "trajectory touches a zero population");
  }
  return inc;
}

StochasticIncrements IncrementCalculator::operator()(const Trajectory& t) const {
  if (!(t.p_forward > threshold_)) {
    throw Error(ErrorKind::OffSupport, "p_forward = " + std::to_string(t.p_forward));
  }
  return unchecked(t);
}

StochasticIncrements increments(const Trajectory& traj, const MeasurementFrame& frame) {
  return IncrementCalculator(frame)(traj);
}

StateFunctionals state_functionals(const MeasurementFrame& frame) {
  StateFunctionals f{};
  f.s_a_initial = von_neumann_entropy(frame.initial.marginal_a);
  f.s_b_initial = von_neumann_entropy(frame.initial.marginal_b);
  f.s_ab_initial = von_neumann_entropy(frame.initial.joint);
  f.s_a_final = von_neumann_entropy(frame.final.marginal_a);
  f.s_b_final = von_neumann_entropy(frame.final.marginal_b);
  f.s_ab_final = von_neumann_entropy(frame.final.joint);
  f.mutual_information_initial = quantum_mutual_information(frame.initial);
  f.mutual_information_final = quantum_mutual_information(frame.final);
  f.classical_mi_initial = classical_mutual_information(frame.initial);
  f.classical_mi_final = classical_mutual_information(frame.final);
  f.information_content_initial = information_content_average(frame.initial, frame.tol);
  f.information_content_final = information_content_average(frame.final, frame.tol);
  return f;
}

EnsembleReport analyze(const MeasurementFrame& frame, std::span<const Trajectory> trajectories,
                       std::size_t workers) {
  const IncrementCalculator calc(frame);
  const double threshold = frame.tol.probability_clip;
  const std::size_t n_blocks = (trajectories.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<PartialSums> partial(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t block) {
    PartialSums& s = partial[block];
    const std::size_t end = std::min(trajectories.size(), (block + 1) * kReductionBlock);
    for (std::size_t i = block * kReductionBlock; i < end; ++i) {
      const Trajectory& t = trajectories[i];
      s.forward_mass += t.p_forward;
      s.reverse_mass += t.p_reverse;
      if (!(t.p_forward > threshold)) {
        s.reverse_off_support += t.p_reverse;
        continue;
      }
      const StochasticIncrements inc = calc(t);
      const double p = t.p_forward;
      ++s.support;
      s.ift += p * std::exp(-inc.sigma());
      s.ift_classical += p * std::exp(-inc.sigma_classical());
      s.ds_a += p * inc.ds_a;
      s.ds_b += p * inc.ds_b;
      s.di += p * inc.di;
      s.dj += p * inc.dj;
      s.beta_q += p * inc.beta_q;
      s.kl += p * std::log(p / t.p_reverse);
      s.crooks = std::max(s.crooks, crooks_residual(t, inc));
      s.di_dj = std::max(s.di_dj, std::abs(inc.di - inc.dj));
      s.exponent = std::max(s.exponent, std::abs(inc.sigma()));
    }
  });
  PartialSums total;
  for (const PartialSums& s : partial) total.add(s);

  EnsembleReport report;
  report.mode = Mode::Exact;
  report.ift_value = total.ift;
  report.ift_classical = total.ift_classical;
  report.avg_ds_a = total.ds_a;
  report.avg_ds_b = total.ds_b;
  report.avg_di = total.di;
  report.avg_dj = total.dj;
  report.avg_beta_q = total.beta_q;
  report.inequality_slack = inequality_check(report);
  report.kl_divergence = total.kl;
  report.crooks_max_relative_residual = total.crooks;
  report.max_abs_di_minus_dj = total.di_dj;
  report.max_abs_exponent = total.exponent;
  report.forward_mass = total.forward_mass;
  report.reverse_mass = total.reverse_mass;
  report.reverse_mass_off_support = total.reverse_off_support;
  report.support_size = total.support;
  report.functionals = state_functionals(frame);
  return report;
}

double integral_ft(std::span<const Trajectory> distribution, const MeasurementFrame& frame) {
  const IncrementCalculator calc(frame);
  double total = 0.0;
  for (const Trajectory& t : distribution) {
    if (!(t.p_forward > frame.tol.probability_clip)) continue;
    total += t.p_forward * std::exp(-calc(t).sigma());
  }
  return total;
}

double crooks_check(std::span<const Trajectory> trajectories, const MeasurementFrame& frame) {
  const IncrementCalculator calc(frame);
  double worst = 0.0;
  for (const Trajectory& t : trajectories) {
    if (!(t.p_forward > frame.tol.probability_clip)) continue;
    worst = std::max(worst, crooks_residual(t, calc(t)));
  }
  return worst;
}

double kl_divergence(std::span<const Trajectory> trajectories, const Tolerances& tol) {
  double total = 0.0;
  for (const Trajectory& t : trajectories) {
    if (!(t.p_forward > tol.probability_clip)) continue;
    total += t.p_forward * std::log(t.p_forward / t.p_reverse);
  }
  return total;
}

double inequality_check(const EnsembleReport& r) { return r.avg_ds_a + r.avg_ds_b - r.avg_di - r.avg_beta_q; }

double landauer_bound(const EnsembleReport& r, LandauerMode mode) {
  return r.avg_ds_a - (mode == LandauerMode::Classical ? r.avg_dj : r.avg_di);
}

double landauer_check(const EnsembleReport& r, LandauerMode mode, const Tolerances& tol) {
  if (std::abs(r.avg_ds_b) > tol.assumption) {
    throw Error(ErrorKind::AssumptionViolated,
                "Landauer mode needs <ds_B> = 0, got " + std::to_string(r.avg_ds_b));
  }
  return landauer_bound(r, mode) - r.avg_beta_q;
}

double AverageIdentityResiduals::max() const { return std::max({ds_a, ds_b, di, dj}); }

AverageIdentityResiduals average_identity_residuals(const EnsembleReport& r) {
  const StateFunctionals& f = r.functionals;
  return AverageIdentityResiduals{
      std::abs(r.avg_ds_a - (f.s_a_final - f.s_a_initial)),
      std::abs(r.avg_ds_b - (f.s_b_final - f.s_b_initial)),
      std::abs(r.avg_di - (f.mutual_information_final - f.mutual_information_initial)),
      std::abs(r.avg_dj - (f.classical_mi_final - f.classical_mi_initial)),
  };
}

const char* to_string(Mode mode) noexcept { return mode == Mode::Exact ? "exact" : "sampled"; }

const char* to_string(LandauerMode mode) noexcept {
  return mode == LandauerMode::Classical ? "classical" : "quantum";
}

}  // namespace qfluct
