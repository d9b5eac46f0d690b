#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "qfluct/linalg.hpp"
#include "qfluct/protocol.hpp"
#include "qfluct/quantum_state.hpp"

namespace qfluct::testing {

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline ComplexMatrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

inline ComplexMatrix ket_projector(const ComplexVector& v) { return v * v.adjoint(); }

inline ComplexMatrix bell_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return ket_projector(v);
}

inline ComplexMatrix diagonal(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

/// A 2x2x(d_R) process with random state, Haar U, and energies 0..d_R-1.
inline ProcessSpec random_spec(std::uint64_t seed, Eigen::Index d_r, Eigen::Index rank, double beta) {
  std::mt19937_64 rng(seed);
  const DensityOperator rho = random_density(4, rank, rng);
  ComplexMatrix h = ComplexMatrix::Zero(d_r, d_r);
  for (Eigen::Index r = 0; r < d_r; ++r) h(r, r) = static_cast<double>(r);
  return make_process_spec(make_bipartite(rho.matrix(), 2, 2), h, beta, random_unitary(4 * d_r, rng));
}

}  // namespace qfluct::testing
