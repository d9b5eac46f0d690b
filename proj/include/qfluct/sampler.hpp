#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "qfluct/fluctuation.hpp"
#include "qfluct/protocol.hpp"

namespace qfluct {

struct SampleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

enum class Quantity { IftExponent, IftClassicalExponent, DsA, DsB, DI, DJ, BetaQ, Sigma };

const char* to_string(Quantity q) noexcept;

/// Ancestral sampler along the factorization of the forward distribution:
/// (m,r) ~ p_m p_r, (a,b) ~ |<m|a,b>|^2, (m',r') ~ |<m',r'|U|m,r>|^2,
/// (a',b') ~ |<m'|a',b'>|^2, each by inverse CDF over a cumulative table.
class TrajectorySampler {
 public:
  explicit TrajectorySampler(const MeasurementFrame& frame);

  Trajectory sample(std::mt19937_64& rng) const;

 private:
  std::vector<double> start_cdf_;       // over (m, r)
  std::vector<double> overlap_cdf_;     // per m, over (a, b)
  std::vector<double> kernel_cdf_;      // per (m, r), over (m', r')
  std::vector<double> overlap_f_cdf_;   // per m', over (a', b')
  Eigen::Index d_a_, d_b_, d_ab_, d_r_;
  TransitionKernel kernel_;
  OverlapTable overlap_i_, overlap_f_;
  RealVector p_m_, p_r_, p_m_f_;
};

Trajectory sample_trajectory(const MeasurementFrame& frame, std::uint64_t seed);

/// Mean and standard error (plain sample variance) of one quantity over `n`
/// trajectories. Samples are drawn in fixed-size chunks, chunk c from its own
/// generator seeded by (seed, c), and chunk statistics are merged in chunk
/// order: estimates are identical for any `workers`.
SampleEstimate estimate(const MeasurementFrame& frame, Quantity quantity, std::size_t n, std::uint64_t seed,
                        std::size_t workers = 1);

/// All quantities from one set of draws, as a sampled-mode EnsembleReport
/// (means in the avg_* fields, standard errors filled).
EnsembleReport estimate_report(const MeasurementFrame& frame, std::size_t n, std::uint64_t seed,
                               std::size_t workers = 1);

/// Generator for chunk `chunk` of a run seeded with `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk);

}  // namespace qfluct
