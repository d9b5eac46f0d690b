#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "doctest.h"
#include "qfluct/error.hpp"
#include "qfluct/protocol.hpp"
#include "test_helpers.hpp"

using namespace qfluct;
using qfluct::testing::max_abs_diff;

namespace {

ProcessSpec toffoli_spec() {
  ComplexVector psi = ComplexVector::Constant(4, 0.5);
  ComplexVector zero = ComplexVector::Zero(2);
  zero[0] = 1.0;
  const ComplexMatrix joint = kron(testing::ket_projector(psi), testing::ket_projector(zero));
  const int perm[] = {0, 1, 2, 3, 4, 5, 7, 6};
  return make_process_spec(make_bipartite(joint, 4, 2), ComplexMatrix::Zero(1, 1), 1.0, permutation_matrix(perm));
}

// SWAP of B and R on qubits A (x) B (x) R, written out index by index.
ComplexMatrix swap_br() {
  ComplexMatrix s = ComplexMatrix::Zero(8, 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int r = 0; r < 2; ++r) s(a * 4 + r * 2 + b, a * 4 + b * 2 + r) = 1.0;
  return s;
}

ProcessSpec product_diagonal_spec(const ComplexMatrix& u, Eigen::Index d_r) {
  ComplexMatrix h = ComplexMatrix::Zero(d_r, d_r);
  for (Eigen::Index r = 0; r < d_r; ++r) h(r, r) = 0.7 * static_cast<double>(r);
  return make_process_spec(make_bipartite(testing::diagonal({0.4, 0.3, 0.2, 0.1}), 2, 2), h, 1.3, u);
}

}  // namespace

TEST_CASE("make_process_spec validation") {
  const BipartiteState s = make_bipartite(testing::bell_state(), 2, 2);
  CHECK_THROWS_AS(make_process_spec(s, ComplexMatrix::Zero(2, 2), 1.0, ComplexMatrix::Identity(4, 4)), Error);
  CHECK_THROWS_AS(make_process_spec(s, ComplexMatrix::Zero(1, 1), 1.0, ComplexMatrix::Identity(4, 4) * 1.1), Error);
  CHECK_THROWS_AS(make_process_spec(s, ComplexMatrix::Zero(1, 1), -1.0, ComplexMatrix::Identity(4, 4)), Error);
  CHECK_NOTHROW(make_process_spec(s, ComplexMatrix::Zero(1, 1), 0.0, ComplexMatrix::Identity(4, 4)));
}

TEST_CASE("evolve with the identity keeps the spectra") {
  const ProcessSpec spec = testing::random_spec(3, 2, 3, 0.5);
  const ProcessSpec id = make_process_spec(spec.initial, spec.reservoir_hamiltonian, spec.beta,
                                           ComplexMatrix::Identity(8, 8));
  const MeasurementFrame f = evolve(id);
  CHECK((f.final.joint.probabilities() - f.initial.joint.probabilities()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.final.marginal_a.probabilities() - f.initial.marginal_a.probabilities()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.final.marginal_b.probabilities() - f.initial.marginal_b.probabilities()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evolve Toffoli reaches |Phi>") {
  const MeasurementFrame f = evolve(toffoli_spec());
  ComplexVector phi = ComplexVector::Zero(8);
  phi[0] = phi[2] = phi[4] = phi[7] = 0.5;  // |00,0>, |01,0>, |10,0>, |11,1>
  CHECK(max_abs_diff(f.final.joint.matrix(), testing::ket_projector(phi)) < 1e-15);
}

TEST_CASE("evolve swap B<->R hands B the reservoir state") {
  std::mt19937_64 rng(12);
  const BipartiteState s = make_bipartite(random_density(4, 4, rng).matrix(), 2, 2);
  const ComplexMatrix h = testing::diagonal({0.0, 1.0});
  const ProcessSpec spec = make_process_spec(s, h, 0.9, swap_br());
  const MeasurementFrame f = evolve(spec);
  CHECK(max_abs_diff(f.final.marginal_b.matrix(), f.reservoir.state.matrix()) < 1e-14);
  CHECK(max_abs_diff(f.final.marginal_a.matrix(), s.marginal_a.matrix()) < 1e-14);
}

TEST_CASE("transition_probability") {
  SUBCASE("identity is diagonal") {
    const ProcessSpec spec = product_diagonal_spec(ComplexMatrix::Identity(8, 8), 2);
    const MeasurementFrame f = evolve(spec);
    const TransitionKernel t = transition_probability(f, f.unitary);
    double total = 0.0;
    for (Eigen::Index m = 0; m < 4; ++m)
      for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index mf = 0; mf < 4; ++mf)
          for (Eigen::Index rf = 0; rf < 2; ++rf) {
            const double expected = (m == mf && r == rf)
                                        ? f.initial.joint.probabilities()[m] * f.reservoir.state.probabilities()[r]
                                        : 0.0;
            CHECK(std::abs(t(m, r, mf, rf) - expected) < 1e-15);
            total += t(m, r, mf, rf);
          }
    CHECK(std::abs(total - 1.0) < 1e-14);
  }
  SUBCASE("random instance marginals") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const MeasurementFrame f = evolve(testing::random_spec(seed, 2, 1 + seed % 4, 1.0));
      const TransitionKernel t = transition_probability(f, f.unitary);
      const RealVector& pm = f.initial.joint.probabilities();
      const RealVector& pr = f.reservoir.state.probabilities();
      RealVector final_marginal = RealVector::Zero(4);
      for (Eigen::Index m = 0; m < 4; ++m)
        for (Eigen::Index r = 0; r < 2; ++r) {
          double row = 0.0;
          for (Eigen::Index mf = 0; mf < 4; ++mf)
            for (Eigen::Index rf = 0; rf < 2; ++rf) {
              row += t(m, r, mf, rf);
              final_marginal[mf] += t(m, r, mf, rf);
            }
          CHECK(std::abs(row - pm[m] * pr[r]) < 1e-12);
        }
      // Oracle: eigenvalues of the evolved reduced state.
      const ProcessSpec spec = testing::random_spec(seed, 2, 1 + seed % 4, 1.0);
      const ThermalState th = thermal_state(spec.reservoir_hamiltonian, spec.beta);
      const ComplexMatrix full = spec.unitary * kron(spec.initial.joint.matrix(), th.state.matrix()) *
                                 spec.unitary.adjoint();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(partial_trace(full, 4, 2, Subsystem::A));
      const RealVector oracle = eig.eigenvalues().reverse();
      CHECK((final_marginal - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("microreversibility of the reverse kernel") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MeasurementFrame f = evolve(testing::random_spec(100 + seed, 2, 4, 0.7));
    const TransitionKernel fwd = transition_kernel(f, f.unitary);
    const TransitionKernel rev = reverse_kernel_via_time_reversal(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < fwd.values().size(); ++i)
      worst = std::max(worst, std::abs(fwd.values()[i] - rev.values()[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("conditional_overlap") {
  SUBCASE("product eigenbasis gives Kronecker deltas") {
    const MeasurementFrame f = evolve(product_diagonal_spec(ComplexMatrix::Identity(8, 8), 2));
    const OverlapTable o = conditional_overlap(f, Time::Initial);
    for (Eigen::Index m = 0; m < 4; ++m)
      for (Eigen::Index a = 0; a < 2; ++a)
        for (Eigen::Index b = 0; b < 2; ++b) {
          // Eigenvalue order 0.4, 0.3, 0.2, 0.1 is |00>, |01>, |10>, |11>.
          CHECK(o(m, a, b) == doctest::Approx(m == a * 2 + b ? 1.0 : 0.0));
        }
  }
  SUBCASE("Bell state") {
    const BipartiteState s = make_bipartite(testing::bell_state(), 2, 2);
    const OverlapTable o = conditional_overlap(s);
    CHECK(o(0, 0, 0) == doctest::Approx(0.5));
    CHECK(o(0, 1, 1) == doctest::Approx(0.5));
    CHECK(std::abs(o(0, 0, 1)) < 1e-15);
    CHECK(std::abs(o(0, 1, 0)) < 1e-15);
  }
  SUBCASE("random states are doubly stochastic") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      const BipartiteState s = make_bipartite(random_density(6, 1 + trial % 6, rng).matrix(), 2, 3);
      const OverlapTable o = conditional_overlap(s);
      for (Eigen::Index m = 0; m < 6; ++m) {
        double row = 0.0, col = 0.0;
        for (Eigen::Index ab = 0; ab < 6; ++ab) {
          row += o(m, ab / 3, ab % 3);
          col += o(ab, m / 3, m % 3);
        }
        CHECK(std::abs(row - 1.0) < 1e-10);
        CHECK(std::abs(col - 1.0) < 1e-10);
      }
    }
  }
}

TEST_CASE("consecutive vs reversed-order joint probability") {
  const BipartiteState bell = make_bipartite(testing::bell_state(), 2, 2);
  const std::vector<double> forward = consecutive_joint(bell);
  const std::vector<double> reversed = reversed_order_joint(bell);
  CHECK(forward[0] == doctest::Approx(0.5));
  CHECK(reversed[0] == doctest::Approx(0.25));
  double sf = 0.0, sr = 0.0;
  for (double v : forward) sf += v;
  for (double v : reversed) sr += v;
  CHECK(sf == doctest::Approx(1.0));
  CHECK(sr == doctest::Approx(1.0));
}

TEST_CASE("forward_distribution") {
  SUBCASE("size, order and normalization") {
    const MeasurementFrame f = evolve(testing::random_spec(5, 2, 4, 1.0));
    const std::vector<Trajectory> traj = forward_distribution(f, Enumeration::Full);
    CHECK(traj.size() == std::size_t(4 * 2 * 2 * 2) * (4 * 2 * 2 * 2));
    double total = 0.0;
    for (const Trajectory& t : traj) total += t.p_forward;
    CHECK(std::abs(total - 1.0) < 1e-9);
    const auto key = [](const Trajectory& t) { return std::tie(t.m, t.a, t.b, t.r, t.m_f, t.a_f, t.b_f, t.r_f); };
    CHECK(std::is_sorted(traj.begin(), traj.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); }));
  }
  SUBCASE("marginal over the final outcomes") {
    const MeasurementFrame f = evolve(testing::random_spec(6, 2, 2, 1.0));
    const OverlapTable o = conditional_overlap(f, Time::Initial);
    std::map<std::tuple<int, int, int, int>, double> marginal;
    for (const Trajectory& t : forward_distribution(f)) marginal[{t.m, t.a, t.b, t.r}] += t.p_forward;
    for (const auto& [k, v] : marginal) {
      const auto [m, a, b, r] = k;
      const double expected =
          o(m, a, b) * f.initial.joint.probabilities()[m] * f.reservoir.state.probabilities()[r];
      CHECK(std::abs(v - expected) < 1e-10);
    }
  }
  SUBCASE("product eigenbasis coincides with the conventional TMP") {
    const int perm[] = {3, 0, 6, 1, 7, 2, 5, 4};
    const MeasurementFrame f = evolve(product_diagonal_spec(permutation_matrix(perm), 2));
    const std::vector<double> tmp = tmp_distribution(f);
    const OverlapTable oi = conditional_overlap(f, Time::Initial);
    const OverlapTable of = conditional_overlap(f, Time::Final);
    REQUIRE(oi(0, 0, 0) == doctest::Approx(1.0));
    double worst = 0.0;
    for (const Trajectory& t : forward_distribution(f)) {
      if (oi(t.m, t.a, t.b) < 0.5 || of(t.m_f, t.a_f, t.b_f) < 0.5) {
        CHECK(t.p_forward < 1e-15);
        continue;
      }
      const std::size_t idx = static_cast<std::size_t>(((t.a * 2 + t.b) * 2 + t.r) * 8 + (t.a_f * 2 + t.b_f) * 2 + t.r_f);
      worst = std::max(worst, std::abs(t.p_forward - tmp[idx]));
    }
    CHECK(worst < 1e-14);
  }
  SUBCASE("support mode drops only negligible entries") {
    const MeasurementFrame f = evolve(product_diagonal_spec(ComplexMatrix::Identity(8, 8), 2));
    const std::vector<Trajectory> full = enumerate_trajectories(f, Enumeration::Full);
    const std::vector<Trajectory> support = enumerate_trajectories(f, Enumeration::Support);
    CHECK(support.size() < full.size());
    double fwd = 0.0, rev = 0.0;
    for (const Trajectory& t : support) {
      fwd += t.p_forward;
      rev += t.p_reverse;
    }
    CHECK(std::abs(fwd - 1.0) < 1e-12);
    CHECK(std::abs(rev - 1.0) < 1e-12);
  }
  SUBCASE("worker count does not change the result") {
    const MeasurementFrame f = evolve(testing::random_spec(9, 4, 3, 2.0));
    const std::vector<Trajectory> one = enumerate_trajectories(f, Enumeration::Support, 1);
    const std::vector<Trajectory> many = enumerate_trajectories(f, Enumeration::Support, 7);
    REQUIRE(one.size() == many.size());
    bool identical = true;
    for (std::size_t i = 0; i < one.size(); ++i)
      identical = identical && one[i].p_forward == many[i].p_forward && one[i].p_reverse == many[i].p_reverse &&
                  one[i].m_f == many[i].m_f;
    CHECK(identical);
  }
}

TEST_CASE("reverse_distribution") {
  SUBCASE("stationary identity process is self-inverse") {
    const ProcessSpec spec = product_diagonal_spec(ComplexMatrix::Identity(8, 8), 2);
    const std::vector<Trajectory> traj = enumerate_trajectories(evolve(spec));
    double worst = 0.0;
    for (const Trajectory& t : traj) worst = std::max(worst, std::abs(t.p_forward - t.p_reverse));
    CHECK(worst < 1e-15);
  }
  SUBCASE("normalization on random specs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const MeasurementFrame f = evolve(testing::random_spec(200 + seed, 1 + seed % 3, 1 + seed % 4, 0.5));
      double rev = 0.0;
      for (const Trajectory& t : enumerate_trajectories(f)) rev += t.p_reverse;
      CHECK(std::abs(rev - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("support consistency: positive weight implies positive populations") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const MeasurementFrame f = evolve(testing::random_spec(300 + seed, 1 + seed % 4, 1 + seed % 4, 1.0));
    bool ok = true;
    for (const Trajectory& t : enumerate_trajectories(f, Enumeration::Support)) {
      if (t.p_forward <= 1e-14) continue;
      ok = ok && f.initial.joint.probabilities()[t.m] > 0 && f.initial.marginal_a.probabilities()[t.a] > 0 &&
           f.initial.marginal_b.probabilities()[t.b] > 0 && f.reservoir.state.probabilities()[t.r] > 0 &&
           f.final.joint.probabilities()[t.m_f] > 0 && f.final.marginal_a.probabilities()[t.a_f] > 0 &&
           f.final.marginal_b.probabilities()[t.b_f] > 0 && f.reservoir.state.probabilities()[t.r_f] > 0;
    }
    CHECK(ok);
  }
}
