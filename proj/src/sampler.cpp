#include "qfluct/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qfluct/error.hpp"
#include "qfluct/parallel.hpp"

namespace qfluct {

namespace {

constexpr std::size_t kChunk = 1024;

// Appends the running sums of `weights` to `cdf`.
void append_cdf(std::vector<double>& cdf, const std::vector<double>& weights) {
  double acc = 0.0;
  for (double w : weights) {
    acc += std::max(w, 0.0);
    cdf.push_back(acc);
  }
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index into [first, first + n) by inverse CDF; zero-weight bins are never chosen.
Eigen::Index draw(const std::vector<double>& cdf, std::size_t first, std::size_t n, std::mt19937_64& rng) {
  const auto begin = cdf.begin() + static_cast<std::ptrdiff_t>(first);
  const auto end = begin + static_cast<std::ptrdiff_t>(n);
  const double total = *(end - 1);
  if (!(total > 0.0)) throw Error(ErrorKind::SupportEmpty, "sampling from a zero-weight row");
  const double target = uniform01(rng) * total;
  auto it = std::upper_bound(begin, end, target);
  if (it == end) --it;
  return static_cast<Eigen::Index>(it - begin);
}

// Welford accumulator; merged across chunks with Chan's formula.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  SampleEstimate estimate() const {
    SampleEstimate e;
    e.mean = mean;
    e.n_samples = n;
    e.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return e;
  }
};

constexpr std::size_t kQuantities = 8;

double select(const StochasticIncrements& inc, Quantity q) {
  switch (q) {
    case Quantity::IftExponent: return std::exp(-inc.sigma());
    case Quantity::IftClassicalExponent: return std::exp(-inc.sigma_classical());
    case Quantity::DsA: return inc.ds_a;
    case Quantity::DsB: return inc.ds_b;
    case Quantity::DI: return inc.di;
    case Quantity::DJ: return inc.dj;
    case Quantity::BetaQ: return inc.beta_q;
    case Quantity::Sigma: return inc.sigma();
  }
  return 0.0;
}

struct ChunkStats {
  std::array<Moments, kQuantities> moments;
  double crooks = 0.0;
};

std::vector<ChunkStats> run_chunks(const MeasurementFrame& frame, std::size_t n, std::uint64_t seed,
                                   std::size_t workers) {
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "sample count must be positive");
  const TrajectorySampler sampler(frame);
  const IncrementCalculator calc(frame);
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkStats> chunks(n_chunks);
  for_each_block(n_chunks, workers, [&](std::size_t c) {
    std::mt19937_64 rng = substream(seed, c);
    const std::size_t count = std::min(kChunk, n - c * kChunk);
    ChunkStats& stats = chunks[c];
    for (std::size_t i = 0; i < count; ++i) {
      const Trajectory t = sampler.sample(rng);
      const StochasticIncrements inc = calc.unchecked(t);
      for (std::size_t q = 0; q < kQuantities; ++q) stats.moments[q].push(select(inc, static_cast<Quantity>(q)));
      if (t.p_forward > 0.0) {
        const double ratio = t.p_reverse / t.p_forward;
        stats.crooks = std::max(stats.crooks, std::abs(ratio - std::exp(-inc.sigma())) / ratio);
      }
    }
  });
  return chunks;
}

}  // namespace

const char* to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::IftExponent: return "ift";
    case Quantity::IftClassicalExponent: return "ift_classical";
    case Quantity::DsA: return "ds_A";
    case Quantity::DsB: return "ds_B";
    case Quantity::DI: return "dI";
    case Quantity::DJ: return "dJ";
    case Quantity::BetaQ: return "betaQ";
    case Quantity::Sigma: return "sigma";
  }
  return "unknown";
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

TrajectorySampler::TrajectorySampler(const MeasurementFrame& frame)
    : d_a_(frame.d_a()),
      d_b_(frame.d_b()),
      d_ab_(frame.d_ab()),
      d_r_(frame.d_r()),
      kernel_(transition_kernel(frame, frame.unitary)),
      overlap_i_(conditional_overlap(frame.initial)),
      overlap_f_(conditional_overlap(frame.final)),
      p_m_(frame.initial.joint.probabilities()),
      p_r_(frame.reservoir.state.probabilities()),
      p_m_f_(frame.final.joint.probabilities()) {
  std::vector<double> w;
  for (Eigen::Index m = 0; m < d_ab_; ++m)
    for (Eigen::Index r = 0; r < d_r_; ++r) w.push_back(p_m_[m] * p_r_[r]);
  append_cdf(start_cdf_, w);

  for (Eigen::Index m = 0; m < d_ab_; ++m) {
    w.clear();
    for (Eigen::Index a = 0; a < d_a_; ++a)
      for (Eigen::Index b = 0; b < d_b_; ++b) w.push_back(overlap_i_(m, a, b));
    append_cdf(overlap_cdf_, w);
    w.clear();
    for (Eigen::Index a = 0; a < d_a_; ++a)
      for (Eigen::Index b = 0; b < d_b_; ++b) w.push_back(overlap_f_(m, a, b));
    append_cdf(overlap_f_cdf_, w);
  }

  for (Eigen::Index m = 0; m < d_ab_; ++m) {
    for (Eigen::Index r = 0; r < d_r_; ++r) {
      w.clear();
      for (Eigen::Index mf = 0; mf < d_ab_; ++mf)
        for (Eigen::Index rf = 0; rf < d_r_; ++rf) w.push_back(kernel_(m, r, mf, rf));
      append_cdf(kernel_cdf_, w);
    }
  }
}

Trajectory TrajectorySampler::sample(std::mt19937_64& rng) const {
  const auto ab = static_cast<std::size_t>(d_ab_);
  const auto abr = static_cast<std::size_t>(d_ab_ * d_r_);

  const Eigen::Index mr = draw(start_cdf_, 0, abr, rng);
  const Eigen::Index m = mr / d_r_, r = mr % d_r_;
  const Eigen::Index ab_i = draw(overlap_cdf_, static_cast<std::size_t>(m) * ab, ab, rng);
  const Eigen::Index mrf = draw(kernel_cdf_, static_cast<std::size_t>(mr) * abr, abr, rng);
  const Eigen::Index mf = mrf / d_r_, rf = mrf % d_r_;
  const Eigen::Index ab_f = draw(overlap_f_cdf_, static_cast<std::size_t>(mf) * ab, ab, rng);

  Trajectory t{static_cast<std::int32_t>(m),         static_cast<std::int32_t>(ab_i / d_b_),
               static_cast<std::int32_t>(ab_i % d_b_), static_cast<std::int32_t>(r),
               static_cast<std::int32_t>(mf),        static_cast<std::int32_t>(ab_f / d_b_),
               static_cast<std::int32_t>(ab_f % d_b_), static_cast<std::int32_t>(rf)};
  const double shared = kernel_(m, r, mf, rf) * overlap_i_(m, t.a, t.b) * overlap_f_(mf, t.a_f, t.b_f);
  t.p_forward = shared * p_m_[m] * p_r_[r];
  t.p_reverse = shared * p_m_f_[mf] * p_r_[rf];
  return t;
}

Trajectory sample_trajectory(const MeasurementFrame& frame, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return TrajectorySampler(frame).sample(rng);
}

SampleEstimate estimate(const MeasurementFrame& frame, Quantity quantity, std::size_t n, std::uint64_t seed,
                        std::size_t workers) {
  if (n < 2) throw Error(ErrorKind::ConfigInvalid, "estimate needs n >= 2");
  Moments total;
  for (const ChunkStats& c : run_chunks(frame, n, seed, workers)) {
    total.merge(c.moments[static_cast<std::size_t>(quantity)]);
  }
  return total.estimate();
}

EnsembleReport estimate_report(const MeasurementFrame& frame, std::size_t n, std::uint64_t seed,
                               std::size_t workers) {
  if (n < 2) throw Error(ErrorKind::ConfigInvalid, "estimate needs n >= 2");
  std::array<Moments, kQuantities> total;
  double crooks = 0.0;
  for (const ChunkStats& c : run_chunks(frame, n, seed, workers)) {
    for (std::size_t q = 0; q < kQuantities; ++q) total[q].merge(c.moments[q]);
    crooks = std::max(crooks, c.crooks);
  }
  auto get = [&](Quantity q) { return total[static_cast<std::size_t>(q)].estimate(); };

  EnsembleReport report;
  report.mode = Mode::Sampled;
  report.n_samples = n;
  report.ift_value = get(Quantity::IftExponent).mean;
  report.ift_classical = get(Quantity::IftClassicalExponent).mean;
  report.avg_ds_a = get(Quantity::DsA).mean;
  report.avg_ds_b = get(Quantity::DsB).mean;
  report.avg_di = get(Quantity::DI).mean;
  report.avg_dj = get(Quantity::DJ).mean;
  report.avg_beta_q = get(Quantity::BetaQ).mean;
  report.inequality_slack = inequality_check(report);
  report.kl_divergence = get(Quantity::Sigma).mean;
  report.crooks_max_relative_residual = crooks;
  report.functionals = state_functionals(frame);
  report.standard_errors = StandardErrors{get(Quantity::IftExponent).std_error, get(Quantity::DsA).std_error,
                                          get(Quantity::DsB).std_error,         get(Quantity::DI).std_error,
                                          get(Quantity::DJ).std_error,          get(Quantity::BetaQ).std_error,
                                          get(Quantity::Sigma).std_error};
  return report;
}

}  // namespace qfluct
