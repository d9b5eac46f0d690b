#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/tolerances.hpp"

namespace qfluct {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigen-pairs of a Hermitian matrix. Eigenvalues are descending; column k of
/// `eigenvectors` belongs to `eigenvalues[k]`.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Half-open range [begin, end) of indices sharing one eigenvalue.
struct EigenCluster {
  Eigen::Index begin;
  Eigen::Index end;

  Eigen::Index size() const { return end - begin; }
};

enum class Subsystem { A, B };

/// Eigendecomposition with a reproducible basis inside degenerate clusters:
/// each cluster is replaced by pivoted Gram-Schmidt of its projector applied
/// to the computational basis, then every vector is phase-fixed so that its
/// first component of largest magnitude is real and positive.
SpectralDecomposition hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = {});

/// Clusters of eigenvalues whose neighbouring gaps are below
/// `tol.degeneracy * max|lambda|`.
std::vector<EigenCluster> degenerate_clusters(const RealVector& descending,
                                              const Tolerances& tol = {});

/// Left factor varies slowest: (A (x) B)(i_A*d_B + i_B, j_A*d_B + j_B).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index d_a, Eigen::Index d_b,
                            Subsystem keep);

bool is_unitary(const ComplexMatrix& m, double tol);

ComplexMatrix dagger(const ComplexMatrix& m);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector apply_to_vector(const ComplexMatrix& m, const ComplexVector& v);

double max_hermiticity_error(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

/// Reconstruction error ||V diag(l) V^dagger - M||_F / ||M||_F (absolute when M = 0).
double reconstruction_error(const SpectralDecomposition& s, const ComplexMatrix& m);

/// Unitary that maps computational basis state j to state perm[j].
ComplexMatrix permutation_matrix(std::span<const int> perm);

void require_square(const ComplexMatrix& m, const char* what);

}  // namespace qfluct
