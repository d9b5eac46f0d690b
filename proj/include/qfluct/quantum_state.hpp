#pragma once

#include <cstdint>
#include <random>

#include "qfluct/linalg.hpp"
#include "qfluct/tolerances.hpp"

namespace qfluct {

/// Unit-trace positive semidefinite operator with its spectral decomposition.
/// Eigenvalues in [-1e-10, 1e-14] are stored as exactly 0, values above 1 as 1.
class DensityOperator {
 public:
  /// Validates `m`: Hermitian, unit trace, no eigenvalue below -tol.negative_eigenvalue.
  static DensityOperator from_matrix(const ComplexMatrix& m, const Tolerances& tol = {});

  /// Builds rho = V diag(p) V^dagger from a given eigenbasis. Used when the
  /// basis is fixed by something other than rho itself (thermal states, whose
  /// basis must stay the Hamiltonian's even when p is degenerate).
  static DensityOperator from_spectrum(SpectralDecomposition spectrum, const Tolerances& tol = {});

  const ComplexMatrix& matrix() const { return matrix_; }
  const SpectralDecomposition& spectrum() const { return spectrum_; }
  const RealVector& probabilities() const { return spectrum_.eigenvalues; }
  const ComplexMatrix& eigenvectors() const { return spectrum_.eigenvectors; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  DensityOperator(ComplexMatrix matrix, SpectralDecomposition spectrum)
      : matrix_(std::move(matrix)), spectrum_(std::move(spectrum)) {}

  ComplexMatrix matrix_;
  SpectralDecomposition spectrum_;
};

inline DensityOperator make_density(const ComplexMatrix& m, const Tolerances& tol = {}) {
  return DensityOperator::from_matrix(m, tol);
}

/// Joint state on H_A (x) H_B together with both reduced states.
struct BipartiteState {
  Eigen::Index d_a;
  Eigen::Index d_b;
  DensityOperator joint;
  DensityOperator marginal_a;
  DensityOperator marginal_b;
};

BipartiteState make_bipartite(const ComplexMatrix& joint, Eigen::Index d_a, Eigen::Index d_b,
                              const Tolerances& tol = {});

/// Gibbs state of a reservoir. `energies[r]` is the energy of eigenvector r of
/// `state`; ordering is by ascending energy (so descending population).
struct ThermalState {
  DensityOperator state;
  RealVector energies;
  double beta;
};

ThermalState thermal_state(const ComplexMatrix& hamiltonian, double beta, const Tolerances& tol = {});

/// -sum p ln p in nats, with 0 ln 0 = 0.
double von_neumann_entropy(const DensityOperator& rho);
double shannon_entropy(const RealVector& probabilities);

/// S(rho_A) + S(rho_B) - S(rho_AB).
double quantum_mutual_information(const BipartiteState& state);

/// G G^dagger / Tr(G G^dagger) with G a d x rank complex Ginibre matrix.
DensityOperator random_density(Eigen::Index d, Eigen::Index rank, std::uint64_t seed,
                               const Tolerances& tol = {});
DensityOperator random_density(Eigen::Index d, Eigen::Index rank, std::mt19937_64& rng,
                               const Tolerances& tol = {});

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) divided out.
ComplexMatrix random_unitary(Eigen::Index d, std::uint64_t seed);
ComplexMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng);

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

}  // namespace qfluct
