#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qfluct/linalg.hpp"
#include "qfluct/quantum_state.hpp"
#include "qfluct/tolerances.hpp"

namespace qfluct {

/// A full experiment: bipartite initial state, reservoir Hamiltonian at
/// inverse temperature beta, and a global unitary on A (x) B (x) R.
struct ProcessSpec {
  BipartiteState initial;
  ComplexMatrix reservoir_hamiltonian;
  double beta;
  ComplexMatrix unitary;

  Eigen::Index d_a() const { return initial.d_a; }
  Eigen::Index d_b() const { return initial.d_b; }
  Eigen::Index d_ab() const { return initial.d_a * initial.d_b; }
  Eigen::Index d_r() const { return reservoir_hamiltonian.rows(); }
};

/// Validates dimensions, beta and unitarity of `unitary` (tol.unitarity).
ProcessSpec make_process_spec(BipartiteState initial, ComplexMatrix reservoir_hamiltonian, double beta,
                              ComplexMatrix unitary, const Tolerances& tol = {});

struct FrameOptions {
  /// When set, every degenerate eigenspace of the joint and reduced states (both
  /// times) is rotated by a Haar unitary drawn from this seed after
  /// canonicalization. Used to probe basis independence.
  std::optional<std::uint64_t> degenerate_rotation_seed;
};

/// Eigen-data at both measurement times. The reverse process starts from the
/// forward final state, so p~_{m'} = p_{m'} etc., and from the same Gibbs state.
struct MeasurementFrame {
  BipartiteState initial;
  BipartiteState final;
  ThermalState reservoir;
  ComplexMatrix unitary;
  Tolerances tol;

  Eigen::Index d_a() const { return initial.d_a; }
  Eigen::Index d_b() const { return initial.d_b; }
  Eigen::Index d_ab() const { return initial.d_a * initial.d_b; }
  Eigen::Index d_r() const { return reservoir.state.dim(); }
};

MeasurementFrame evolve(const ProcessSpec& spec, const FrameOptions& options = {},
                        const Tolerances& tol = {});

/// |<m',r'|U|m,r>|^2 on the frame's eigenbases.
class TransitionKernel {
 public:
  TransitionKernel(Eigen::Index d_ab, Eigen::Index d_r, std::vector<double> values)
      : d_ab_(d_ab), d_r_(d_r), values_(std::move(values)) {}

  double operator()(Eigen::Index m, Eigen::Index r, Eigen::Index m_f, Eigen::Index r_f) const {
    return values_[static_cast<std::size_t>(((m * d_r_ + r) * d_ab_ + m_f) * d_r_ + r_f)];
  }
  Eigen::Index d_ab() const { return d_ab_; }
  Eigen::Index d_r() const { return d_r_; }
  std::span<const double> values() const { return values_; }

 private:
  Eigen::Index d_ab_;
  Eigen::Index d_r_;
  std::vector<double> values_;
};

TransitionKernel transition_kernel(const MeasurementFrame& frame, const ComplexMatrix& unitary);

/// p_{m,m';r,r'} = |<m',r'|U|m,r>|^2 p_m p_r, stored in the kernel's layout.
TransitionKernel transition_probability(const MeasurementFrame& frame, const ComplexMatrix& unitary);

/// Kernel of the time-reversed process evaluated as |<Theta(m,r)|U~|Theta(m',r')>|^2
/// with Theta complex conjugation and U~ = Theta U^dagger Theta, laid out in
/// forward order. Equal to transition_kernel entrywise.
TransitionKernel reverse_kernel_via_time_reversal(const MeasurementFrame& frame);

enum class Time { Initial, Final };

/// |<m|a,b>|^2 indexed [m][a*d_b + b].
class OverlapTable {
 public:
  OverlapTable(Eigen::Index d_ab, Eigen::Index d_b, std::vector<double> values)
      : d_ab_(d_ab), d_b_(d_b), values_(std::move(values)) {}

  double operator()(Eigen::Index m, Eigen::Index a, Eigen::Index b) const {
    return values_[static_cast<std::size_t>(m * d_ab_ + a * d_b_ + b)];
  }
  Eigen::Index d_ab() const { return d_ab_; }
  std::span<const double> values() const { return values_; }

 private:
  Eigen::Index d_ab_;
  Eigen::Index d_b_;
  std::vector<double> values_;
};

OverlapTable conditional_overlap(const MeasurementFrame& frame, Time time);
OverlapTable conditional_overlap(const BipartiteState& state);

/// p_{s,k,l} = p_s |<s|k,l>|^2, indexed like OverlapTable.
std::vector<double> consecutive_joint(const BipartiteState& state);

/// Diagnostic only: p_{k,l} p_{s|k,l} = <k,l|rho|k,l> |<k,l|s>|^2 (measure the
/// subsystems first). Differs from consecutive_joint for non-commuting bases.
std::vector<double> reversed_order_joint(const BipartiteState& state);

/// <a,b|rho|a,b> on the marginal eigenbases, indexed [a*d_b + b].
std::vector<double> product_basis_populations(const BipartiteState& state);

struct Trajectory {
  std::int32_t m, a, b, r;
  std::int32_t m_f, a_f, b_f, r_f;
  double p_forward = 0.0;
  double p_reverse = 0.0;
};

enum class Enumeration {
  Full,     ///< every index tuple
  Support,  ///< drop tuples whose shared kernel-overlap factor is negligible
};

/// Forward trajectory distribution in lexicographic (m,a,b,r,m',a',b',r') order.
/// `workers` = 0 uses all hardware threads; output is identical for any count.
std::vector<Trajectory> forward_distribution(const MeasurementFrame& frame,
                                             Enumeration enumeration = Enumeration::Full,
                                             std::size_t workers = 1);

/// Fills p_reverse on the index set of `forward`:
/// |<m',r'|U|m,r>|^2 p_{m'} p~_{r'} |<m'|a',b'>|^2 |<m|a,b>|^2.
std::vector<Trajectory> reverse_distribution(const MeasurementFrame& frame,
                                             std::span<const Trajectory> forward,
                                             std::size_t workers = 1);

/// Both distributions in one call.
std::vector<Trajectory> enumerate_trajectories(const MeasurementFrame& frame,
                                               Enumeration enumeration = Enumeration::Full,
                                               std::size_t workers = 1);

/// Conventional two-point measurement in the marginal eigenbases,
/// |<a',b',r'|U|a,b,r>|^2 <a,b|rho|a,b> p_r, indexed
/// [((a*d_b+b)*d_r + r) * (d_ab*d_r) + (a'*d_b+b')*d_r + r'].
std::vector<double> tmp_distribution(const MeasurementFrame& frame);

}  // namespace qfluct
