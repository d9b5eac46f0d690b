#include <cmath>
#include <map>
#include <tuple>

#include "doctest.h"
#include "qfluct/error.hpp"
#include "qfluct/sampler.hpp"
#include "test_helpers.hpp"

using namespace qfluct;

namespace {

using Key = std::tuple<int, int, int, int, int, int, int, int>;

Key key(const Trajectory& t) { return {t.m, t.a, t.b, t.r, t.m_f, t.a_f, t.b_f, t.r_f}; }

}  // namespace

TEST_CASE("pure product state under the identity gives one trajectory") {
  const ProcessSpec spec = make_process_spec(make_bipartite(testing::diagonal({0, 1, 0, 0}), 2, 2),
                                             ComplexMatrix::Zero(1, 1), 1.0, ComplexMatrix::Identity(4, 4));
  const MeasurementFrame frame = evolve(spec);
  const TrajectorySampler sampler(frame);
  std::mt19937_64 rng(4);
  const Trajectory first = sampler.sample(rng);
  CHECK(first.p_forward == doctest::Approx(1.0));
  for (int i = 0; i < 100; ++i) CHECK(key(sampler.sample(rng)) == key(first));

  const SampleEstimate e = estimate(frame, Quantity::IftExponent, 1000, 9);
  CHECK(e.mean == 1.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.n_samples == 1000);
}

TEST_CASE("sampling is deterministic per seed") {
  const MeasurementFrame frame = evolve(testing::random_spec(2, 2, 4, 1.0));
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const Trajectory a = sample_trajectory(frame, seed);
    const Trajectory b = sample_trajectory(frame, seed);
    CHECK(key(a) == key(b));
  }
  const SampleEstimate a = estimate(frame, Quantity::DI, 5000, 17, 1);
  const SampleEstimate b = estimate(frame, Quantity::DI, 5000, 17, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK_THROWS_AS(estimate(frame, Quantity::DI, 1, 17), Error);
}

TEST_CASE("empirical frequencies match the exact distribution") {
  const MeasurementFrame frame = evolve(testing::random_spec(31, 2, 4, 1.0));
  const auto exact = forward_distribution(frame, Enumeration::Support);
  const TrajectorySampler sampler(frame);
  constexpr int n = 1'000'000;
  std::map<Key, int> counts;
  std::mt19937_64 rng(12345);
  for (int i = 0; i < n; ++i) ++counts[key(sampler.sample(rng))];

  int worst_violations = 0;
  for (const Trajectory& t : exact) {
    const double expected = n * t.p_forward;
    const double sd = std::sqrt(n * t.p_forward * (1 - t.p_forward));
    const auto it = counts.find(key(t));
    const double observed = it == counts.end() ? 0.0 : it->second;
    if (std::abs(observed - expected) > 4 * sd + 1e-9) ++worst_violations;
  }
  // Each cell exceeds 4 sigma with probability ~6e-5; allow for a couple.
  CHECK(worst_violations <= 2);
  std::size_t sampled_total = 0;
  for (const auto& [k, c] : counts) sampled_total += c;
  CHECK(sampled_total == n);
}

TEST_CASE("estimates agree with exact enumeration") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    CAPTURE(seed);
    const MeasurementFrame frame = evolve(testing::random_spec(seed, 2, 4, 0.8));
    const EnsembleReport exact = analyze(frame, enumerate_trajectories(frame, Enumeration::Support));
    const EnsembleReport s = estimate_report(frame, 100'000, seed);
    REQUIRE(s.standard_errors);
    CHECK(std::abs(s.ift_value - 1.0) <= 5 * s.standard_errors->ift);
    CHECK(std::abs(s.avg_di - exact.avg_di) <= 5 * s.standard_errors->di);
    CHECK(std::abs(s.avg_ds_a - exact.avg_ds_a) <= 5 * s.standard_errors->ds_a);
    CHECK(std::abs(s.avg_beta_q - exact.avg_beta_q) <= 5 * s.standard_errors->beta_q);
    CHECK(s.n_samples == 100'000);

    const SampleEstimate ift = estimate(frame, Quantity::IftExponent, 100'000, seed);
    CHECK(ift.mean == s.ift_value);
    CHECK(ift.std_error == s.standard_errors->ift);
  }
}
