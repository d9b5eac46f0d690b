#include "qfluct/protocol.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qfluct/error.hpp"
#include "qfluct/parallel.hpp"

namespace qfluct {

namespace {

// Shared kernel * overlap factors at or below this are treated as structural zeros.
double negligible(const Tolerances& tol) { return tol.probability_clip * tol.probability_clip; }

DensityOperator rotate_degenerate(const DensityOperator& rho, std::mt19937_64& rng, const Tolerances& tol) {
  SpectralDecomposition s = rho.spectrum();
  for (const EigenCluster& c : degenerate_clusters(s.eigenvalues, tol)) {
    if (c.size() < 2) continue;
    const ComplexMatrix w = random_unitary(c.size(), rng);
    s.eigenvectors.middleCols(c.begin, c.size()) = s.eigenvectors.middleCols(c.begin, c.size()) * w;
  }
  return DensityOperator::from_spectrum(std::move(s), tol);
}

BipartiteState rotate_degenerate(const BipartiteState& state, std::mt19937_64& rng, const Tolerances& tol) {
  return BipartiteState{state.d_a, state.d_b, rotate_degenerate(state.joint, rng, tol),
                        rotate_degenerate(state.marginal_a, rng, tol),
                        rotate_degenerate(state.marginal_b, rng, tol)};
}

ComplexMatrix measurement_basis(const BipartiteState& state, const ThermalState& reservoir) {
  return kron(state.joint.eigenvectors(), reservoir.state.eigenvectors());
}

}  // namespace

ProcessSpec make_process_spec(BipartiteState initial, ComplexMatrix reservoir_hamiltonian, double beta,
                              ComplexMatrix unitary, const Tolerances& tol) {
  require_square(reservoir_hamiltonian, "reservoir Hamiltonian");
  require_square(unitary, "process unitary");
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorKind::NonFiniteBeta, "beta = " + std::to_string(beta));
  }
  const Eigen::Index d_r = reservoir_hamiltonian.rows();
  const Eigen::Index total = initial.d_a * initial.d_b * d_r;
  if (d_r < 1 || unitary.rows() != total) {
    throw Error(ErrorKind::DimensionMismatch, "unitary is " + std::to_string(unitary.rows()) +
                                                  "-dimensional, expected d_A*d_B*d_R = " +
                                                  std::to_string(total));
  }
  if (max_hermiticity_error(reservoir_hamiltonian) > tol.hermiticity) {
    throw Error(ErrorKind::NotHermitian, "reservoir Hamiltonian");
  }
  if (!is_unitary(unitary, tol.unitarity)) {
    throw Error(ErrorKind::NotUnitary, "process unitary fails U^dagger U = I");
  }
  return ProcessSpec{std::move(initial), std::move(reservoir_hamiltonian), beta, std::move(unitary)};
}

MeasurementFrame evolve(const ProcessSpec& spec, const FrameOptions& options, const Tolerances& tol) {
  ThermalState reservoir = thermal_state(spec.reservoir_hamiltonian, spec.beta, tol);
  const ComplexMatrix full =
      spec.unitary * kron(spec.initial.joint.matrix(), reservoir.state.matrix()) * spec.unitary.adjoint();
  ComplexMatrix final_ab = partial_trace(full, spec.d_ab(), spec.d_r(), Subsystem::A);
  final_ab = (final_ab + final_ab.adjoint()) / 2.0;
  BipartiteState final_state = make_bipartite(final_ab, spec.d_a(), spec.d_b(), tol);
  BipartiteState initial_state = spec.initial;

  if (options.degenerate_rotation_seed) {
    std::mt19937_64 rng(*options.degenerate_rotation_seed);
    initial_state = rotate_degenerate(initial_state, rng, tol);
    final_state = rotate_degenerate(final_state, rng, tol);
  }
  return MeasurementFrame{std::move(initial_state), std::move(final_state), std::move(reservoir), spec.unitary,
                          tol};
}

TransitionKernel transition_kernel(const MeasurementFrame& frame, const ComplexMatrix& unitary) {
  const Eigen::Index d_ab = frame.d_ab();
  const Eigen::Index d_r = frame.d_r();
  if (unitary.rows() != d_ab * d_r || unitary.cols() != d_ab * d_r) {
    throw Error(ErrorKind::DimensionMismatch, "transition_kernel: unitary does not match frame");
  }
  // w(m' r', m r) = <m',r'|U|m,r>
  const ComplexMatrix w = measurement_basis(frame.final, frame.reservoir).adjoint() * unitary *
                          measurement_basis(frame.initial, frame.reservoir);
  std::vector<double> values(static_cast<std::size_t>(w.size()));
  std::size_t k = 0;
  for (Eigen::Index m = 0; m < d_ab; ++m)
    for (Eigen::Index r = 0; r < d_r; ++r)
      for (Eigen::Index mf = 0; mf < d_ab; ++mf)
        for (Eigen::Index rf = 0; rf < d_r; ++rf) values[k++] = std::norm(w(mf * d_r + rf, m * d_r + r));
  return TransitionKernel(d_ab, d_r, std::move(values));
}

TransitionKernel transition_probability(const MeasurementFrame& frame, const ComplexMatrix& unitary) {
  TransitionKernel kernel = transition_kernel(frame, unitary);
  const RealVector& pm = frame.initial.joint.probabilities();
  const RealVector& pr = frame.reservoir.state.probabilities();
  const Eigen::Index d_ab = frame.d_ab();
  const Eigen::Index d_r = frame.d_r();
  std::vector<double> values(kernel.values().begin(), kernel.values().end());
  std::size_t k = 0;
  for (Eigen::Index m = 0; m < d_ab; ++m)
    for (Eigen::Index r = 0; r < d_r; ++r)
      for (Eigen::Index j = 0; j < d_ab * d_r; ++j) values[k++] *= pm[m] * pr[r];
  return TransitionKernel(d_ab, d_r, std::move(values));
}

TransitionKernel reverse_kernel_via_time_reversal(const MeasurementFrame& frame) {
  const Eigen::Index d_ab = frame.d_ab();
  const Eigen::Index d_r = frame.d_r();
  // Theta is complex conjugation in the product computational basis; the reverse
  // dynamics is U~ = Theta U^dagger Theta = U^T, started from Theta|m',r'>.
  const ComplexMatrix reversed_unitary = frame.unitary.transpose();
  const ComplexMatrix theta_initial = measurement_basis(frame.initial, frame.reservoir).conjugate();
  const ComplexMatrix theta_final = measurement_basis(frame.final, frame.reservoir).conjugate();
  // w(m r, m' r') = <Theta(m,r)|U~|Theta(m',r')>
  const ComplexMatrix w = theta_initial.adjoint() * reversed_unitary * theta_final;
  std::vector<double> values(static_cast<std::size_t>(w.size()));
  std::size_t k = 0;
  for (Eigen::Index m = 0; m < d_ab; ++m)
    for (Eigen::Index r = 0; r < d_r; ++r)
      for (Eigen::Index mf = 0; mf < d_ab; ++mf)
        for (Eigen::Index rf = 0; rf < d_r; ++rf) values[k++] = std::norm(w(m * d_r + r, mf * d_r + rf));
  return TransitionKernel(d_ab, d_r, std::move(values));
}

OverlapTable conditional_overlap(const BipartiteState& state) {
  const Eigen::Index d_ab = state.d_a * state.d_b;
  // o(m, a*d_b + b) = <m|a,b>
  const ComplexMatrix o =
      state.joint.eigenvectors().adjoint() * kron(state.marginal_a.eigenvectors(), state.marginal_b.eigenvectors());
  std::vector<double> values(static_cast<std::size_t>(d_ab * d_ab));
  for (Eigen::Index m = 0; m < d_ab; ++m)
    for (Eigen::Index ab = 0; ab < d_ab; ++ab) values[static_cast<std::size_t>(m * d_ab + ab)] = std::norm(o(m, ab));
  return OverlapTable(d_ab, state.d_b, std::move(values));
}

OverlapTable conditional_overlap(const MeasurementFrame& frame, Time time) {
  return conditional_overlap(time == Time::Initial ? frame.initial : frame.final);
}

std::vector<double> consecutive_joint(const BipartiteState& state) {
  const OverlapTable overlap = conditional_overlap(state);
  const RealVector& ps = state.joint.probabilities();
  const Eigen::Index d_ab = overlap.d_ab();
  std::vector<double> out(overlap.values().begin(), overlap.values().end());
  for (Eigen::Index s = 0; s < d_ab; ++s)
    for (Eigen::Index kl = 0; kl < d_ab; ++kl) out[static_cast<std::size_t>(s * d_ab + kl)] *= ps[s];
  return out;
}

std::vector<double> product_basis_populations(const BipartiteState& state) {
  const ComplexMatrix basis = kron(state.marginal_a.eigenvectors(), state.marginal_b.eigenvectors());
  const ComplexMatrix rotated = basis.adjoint() * state.joint.matrix() * basis;
  std::vector<double> out(static_cast<std::size_t>(rotated.rows()));
  for (Eigen::Index i = 0; i < rotated.rows(); ++i) out[static_cast<std::size_t>(i)] = rotated(i, i).real();
  return out;
}

std::vector<double> reversed_order_joint(const BipartiteState& state) {
  const OverlapTable overlap = conditional_overlap(state);
  const std::vector<double> pkl = product_basis_populations(state);
  const Eigen::Index d_ab = overlap.d_ab();
  std::vector<double> out(static_cast<std::size_t>(d_ab * d_ab));
  for (Eigen::Index s = 0; s < d_ab; ++s)
    for (Eigen::Index kl = 0; kl < d_ab; ++kl)
      out[static_cast<std::size_t>(s * d_ab + kl)] = pkl[static_cast<std::size_t>(kl)] * overlap(s, kl / state.d_b, kl % state.d_b);
  return out;
}

namespace {

struct Tables {
  TransitionKernel kernel;
  OverlapTable initial;
  OverlapTable final;
};

Tables make_tables(const MeasurementFrame& frame) {
  return Tables{transition_kernel(frame, frame.unitary), conditional_overlap(frame.initial),
                conditional_overlap(frame.final)};
}

// Fills trajectories of one (m,a,b,r) prefix block in lexicographic order.
void fill_block(const MeasurementFrame& frame, const Tables& t, std::size_t block, Enumeration enumeration,
                std::vector<Trajectory>& out) {
  const Eigen::Index d_a = frame.d_a(), d_b = frame.d_b(), d_ab = frame.d_ab(), d_r = frame.d_r();
  auto idx = static_cast<Eigen::Index>(block);
  const Eigen::Index r = idx % d_r;
  idx /= d_r;
  const Eigen::Index b = idx % d_b;
  idx /= d_b;
  const Eigen::Index a = idx % d_a;
  const Eigen::Index m = idx / d_a;

  const double p_m = frame.initial.joint.probabilities()[m];
  const double p_r = frame.reservoir.state.probabilities()[r];
  const double ov_i = t.initial(m, a, b);
  const double cut = negligible(frame.tol);
  for (Eigen::Index mf = 0; mf < d_ab; ++mf) {
    for (Eigen::Index af = 0; af < d_a; ++af) {
      for (Eigen::Index bf = 0; bf < d_b; ++bf) {
        const double ov_f = t.final(mf, af, bf);
        for (Eigen::Index rf = 0; rf < d_r; ++rf) {
          const double shared = t.kernel(m, r, mf, rf) * ov_i * ov_f;
          if (enumeration == Enumeration::Support && shared <= cut) continue;
          Trajectory tr{static_cast<std::int32_t>(m),  static_cast<std::int32_t>(a),
                        static_cast<std::int32_t>(b),  static_cast<std::int32_t>(r),
                        static_cast<std::int32_t>(mf), static_cast<std::int32_t>(af),
                        static_cast<std::int32_t>(bf), static_cast<std::int32_t>(rf)};
          tr.p_forward = shared * p_m * p_r;
          out.push_back(tr);
        }
      }
    }
  }
}

double reverse_weight(const MeasurementFrame& frame, const Tables& t, const Trajectory& tr) {
  const double p_mf = frame.final.joint.probabilities()[tr.m_f];
  const double p_rf = frame.reservoir.state.probabilities()[tr.r_f];
  return t.kernel(tr.m, tr.r, tr.m_f, tr.r_f) * t.initial(tr.m, tr.a, tr.b) * t.final(tr.m_f, tr.a_f, tr.b_f) *
         p_mf * p_rf;
}

constexpr std::size_t kReverseBlock = 4096;

}  // namespace

std::vector<Trajectory> forward_distribution(const MeasurementFrame& frame, Enumeration enumeration,
                                             std::size_t workers) {
  const Tables tables = make_tables(frame);
  const auto n_blocks = static_cast<std::size_t>(frame.d_ab() * frame.d_a() * frame.d_b() * frame.d_r());
  std::vector<std::vector<Trajectory>> blocks(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t block) { fill_block(frame, tables, block, enumeration, blocks[block]); });

  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  std::vector<Trajectory> out;
  out.reserve(total);
  double mass = 0.0;
  for (const auto& b : blocks) {
    for (const Trajectory& tr : b) {
      mass += tr.p_forward;
      out.push_back(tr);
    }
  }
  if (out.empty() || !(mass > 0.0)) {
    throw Error(ErrorKind::SupportEmpty, "forward distribution has no weight");
  }
  return out;
}

std::vector<Trajectory> reverse_distribution(const MeasurementFrame& frame, std::span<const Trajectory> forward,
                                             std::size_t workers) {
  const Tables tables = make_tables(frame);
  std::vector<Trajectory> out(forward.begin(), forward.end());
  const std::size_t n_blocks = (out.size() + kReverseBlock - 1) / kReverseBlock;
  for_each_block(n_blocks, workers, [&](std::size_t block) {
    const std::size_t end = std::min(out.size(), (block + 1) * kReverseBlock);
    for (std::size_t i = block * kReverseBlock; i < end; ++i) out[i].p_reverse = reverse_weight(frame, tables, out[i]);
  });
  return out;
}

std::vector<Trajectory> enumerate_trajectories(const MeasurementFrame& frame, Enumeration enumeration,
                                               std::size_t workers) {
  const std::vector<Trajectory> forward = forward_distribution(frame, enumeration, workers);
  return reverse_distribution(frame, forward, workers);
}

std::vector<double> tmp_distribution(const MeasurementFrame& frame) {
  const Eigen::Index d_ab = frame.d_ab();
  const Eigen::Index d_r = frame.d_r();
  const Eigen::Index n = d_ab * d_r;
  const ComplexMatrix basis_i =
      kron(kron(frame.initial.marginal_a.eigenvectors(), frame.initial.marginal_b.eigenvectors()),
           frame.reservoir.state.eigenvectors());
  const ComplexMatrix basis_f =
      kron(kron(frame.final.marginal_a.eigenvectors(), frame.final.marginal_b.eigenvectors()),
           frame.reservoir.state.eigenvectors());
  const ComplexMatrix w = basis_f.adjoint() * frame.unitary * basis_i;
  const std::vector<double> pab = product_basis_populations(frame.initial);
  const RealVector& pr = frame.reservoir.state.probabilities();
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (Eigen::Index ab = 0; ab < d_ab; ++ab)
    for (Eigen::Index r = 0; r < d_r; ++r)
      for (Eigen::Index j = 0; j < n; ++j)
        out[static_cast<std::size_t>((ab * d_r + r) * n + j)] =
            std::norm(w(j, ab * d_r + r)) * pab[static_cast<std::size_t>(ab)] * pr[r];
  return out;
}

}  // namespace qfluct
