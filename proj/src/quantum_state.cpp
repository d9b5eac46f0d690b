#include "qfluct/quantum_state.hpp"

#include <cmath>
#include <string>

#include "qfluct/error.hpp"

namespace qfluct {

namespace {

void clip_probabilities(RealVector& p, const Tolerances& tol) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < -tol.negative_eigenvalue) {
      throw Error(ErrorKind::NegativeEigenvalue, "eigenvalue " + std::to_string(p[i]));
    }
    if (p[i] <= tol.probability_clip) p[i] = 0.0;
    if (p[i] > 1.0) p[i] = 1.0;
  }
}

void require_unit_trace(double trace, const Tolerances& tol) {
  if (std::abs(trace - 1.0) > tol.trace) {
    throw Error(ErrorKind::TraceNotOne, "trace = " + std::to_string(trace));
  }
}

}  // namespace

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "density matrix");
  if (m.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "empty density matrix");
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, "density matrix has NaN/Inf entries");
  const double asym = max_hermiticity_error(m);
  if (asym > tol.hermiticity) {
    throw Error(ErrorKind::NotHermitian, "max |rho - rho^dagger| = " + std::to_string(asym));
  }
  ComplexMatrix symmetric = (m + m.adjoint()) / 2.0;
  require_unit_trace(symmetric.trace().real(), tol);
  SpectralDecomposition spectrum = hermitian_eig(symmetric, tol);
  clip_probabilities(spectrum.eigenvalues, tol);
  return DensityOperator(std::move(symmetric), std::move(spectrum));
}

DensityOperator DensityOperator::from_spectrum(SpectralDecomposition spectrum, const Tolerances& tol) {
  require_square(spectrum.eigenvectors, "eigenvector matrix");
  if (spectrum.eigenvectors.cols() != spectrum.eigenvalues.size() || spectrum.size() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "spectrum size does not match eigenvectors");
  }
  if (!is_unitary(spectrum.eigenvectors, tol.unitarity)) {
    throw Error(ErrorKind::NotUnitary, "eigenvectors are not orthonormal");
  }
  require_unit_trace(spectrum.eigenvalues.sum(), tol);
  clip_probabilities(spectrum.eigenvalues, tol);
  ComplexMatrix matrix = spectrum.eigenvectors * spectrum.eigenvalues.cast<Complex>().asDiagonal() *
                         spectrum.eigenvectors.adjoint();
  matrix = (matrix + matrix.adjoint()) / 2.0;
  return DensityOperator(std::move(matrix), std::move(spectrum));
}

BipartiteState make_bipartite(const ComplexMatrix& joint, Eigen::Index d_a, Eigen::Index d_b,
                              const Tolerances& tol) {
  DensityOperator rho = DensityOperator::from_matrix(joint, tol);
  if (d_a <= 0 || d_b <= 0 || rho.dim() != d_a * d_b) {
    throw Error(ErrorKind::DimensionMismatch, "bipartite state of dimension " +
                                                  std::to_string(rho.dim()) + " with d_A=" +
                                                  std::to_string(d_a) + ", d_B=" + std::to_string(d_b));
  }
  DensityOperator a = DensityOperator::from_matrix(partial_trace(rho.matrix(), d_a, d_b, Subsystem::A), tol);
  DensityOperator b = DensityOperator::from_matrix(partial_trace(rho.matrix(), d_a, d_b, Subsystem::B), tol);
  return BipartiteState{d_a, d_b, std::move(rho), std::move(a), std::move(b)};
}

ThermalState thermal_state(const ComplexMatrix& hamiltonian, double beta, const Tolerances& tol) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorKind::NonFiniteBeta, "beta = " + std::to_string(beta));
  }
  const SpectralDecomposition h = hermitian_eig(hamiltonian, tol);
  const Eigen::Index d = h.size();
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "empty reservoir Hamiltonian");

  // hermitian_eig is descending in energy; populations must be descending.
  RealVector energies = h.eigenvalues.reverse();
  SpectralDecomposition spectrum;
  spectrum.eigenvectors = h.eigenvectors.rowwise().reverse();
  spectrum.eigenvalues.resize(d);
  const double ground = energies[0];
  double z = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    spectrum.eigenvalues[r] = std::exp(-beta * (energies[r] - ground));
    z += spectrum.eigenvalues[r];
  }
  spectrum.eigenvalues /= z;
  return ThermalState{DensityOperator::from_spectrum(std::move(spectrum), tol), std::move(energies), beta};
}

double shannon_entropy(const RealVector& probabilities) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double von_neumann_entropy(const DensityOperator& rho) { return shannon_entropy(rho.probabilities()); }

double quantum_mutual_information(const BipartiteState& state) {
  return von_neumann_entropy(state.marginal_a) + von_neumann_entropy(state.marginal_b) -
         von_neumann_entropy(state.joint);
}

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

DensityOperator random_density(Eigen::Index d, Eigen::Index rank, std::mt19937_64& rng,
                               const Tolerances& tol) {
  if (d < 1 || rank < 1 || rank > d) {
    throw Error(ErrorKind::BadRank, "rank " + std::to_string(rank) + " for dimension " + std::to_string(d));
  }
  const ComplexMatrix g = ginibre(d, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::from_matrix((rho + rho.adjoint()) / 2.0, tol);
}

DensityOperator random_density(Eigen::Index d, Eigen::Index rank, std::uint64_t seed,
                               const Tolerances& tol) {
  std::mt19937_64 rng(seed);
  return random_density(d, rank, rng, tol);
}

ComplexMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  if (d < 1) throw Error(ErrorKind::DimensionMismatch, "random_unitary dimension " + std::to_string(d));
  const ComplexMatrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

ComplexMatrix random_unitary(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(d, rng);
}

}  // namespace qfluct
