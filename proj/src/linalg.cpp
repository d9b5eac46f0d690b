#include "qfluct/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfluct/error.hpp"

namespace qfluct {

namespace {

constexpr double kTieTolerance = 1e-12;

// Rotate so the first component of (near-)largest magnitude is real positive.
void fix_phase(Eigen::Ref<ComplexVector> v) {
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag >= largest - kTieTolerance) {
      v *= std::conj(v[i]) / mag;
      v[i] = Complex(mag, 0.0);
      return;
    }
  }
}

ComplexMatrix canonical_cluster_basis(const ComplexMatrix& block) {
  const Eigen::Index n = block.rows();
  const Eigen::Index k = block.cols();
  const ComplexMatrix projector = block * block.adjoint();
  ComplexMatrix basis(n, k);
  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    ComplexVector best_residual;
    for (Eigen::Index i = 0; i < n; ++i) {
      ComplexVector residual = projector.col(i);
      if (step > 0) {
        const auto chosen = basis.leftCols(step);
        residual -= chosen * (chosen.adjoint() * residual);
      }
      const double norm = residual.norm();
      if (norm > best + kTieTolerance) {
        best = norm;
        best_residual = std::move(residual);
      }
    }
    // A second projection pass keeps the new vector orthogonal to working precision.
    if (step > 0) {
      const auto chosen = basis.leftCols(step);
      best_residual -= chosen * (chosen.adjoint() * best_residual);
    }
    basis.col(step) = best_residual / best_residual.norm();
  }
  return basis;
}

}  // namespace

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::NotSquare, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()));
  }
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

double max_hermiticity_error(const ComplexMatrix& m) {
  require_square(m, "matrix");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<EigenCluster> degenerate_clusters(const RealVector& descending, const Tolerances& tol) {
  std::vector<EigenCluster> clusters;
  const Eigen::Index n = descending.size();
  if (n == 0) return clusters;
  const double scale = descending.cwiseAbs().maxCoeff();
  const double gap = tol.degeneracy * scale;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || descending[i - 1] - descending[i] > gap) {
      clusters.push_back({begin, i});
      begin = i;
    }
  }
  return clusters;
}

SpectralDecomposition hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  require_square(m, "hermitian_eig input");
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, "hermitian_eig input has NaN/Inf entries");
  const double asym = max_hermiticity_error(m);
  if (asym > tol.hermiticity) {
    throw Error(ErrorKind::NotHermitian, "max |M - M^dagger| = " + std::to_string(asym));
  }
  const Eigen::Index n = m.rows();
  SpectralDecomposition out;
  if (n == 0) return out;

  const ComplexMatrix symmetric = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(symmetric);
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();

  for (const EigenCluster& c : degenerate_clusters(out.eigenvalues, tol)) {
    if (c.size() > 1) {
      out.eigenvectors.middleCols(c.begin, c.size()) =
          canonical_cluster_basis(out.eigenvectors.middleCols(c.begin, c.size()));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) fix_phase(out.eigenvectors.col(k));
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Eigen::Index d_a, Eigen::Index d_b,
                            Subsystem keep) {
  require_square(m, "partial_trace input");
  if (d_a <= 0 || d_b <= 0 || m.rows() != d_a * d_b) {
    throw Error(ErrorKind::DimensionMismatch, "partial_trace: matrix dimension " +
                                                  std::to_string(m.rows()) + " != " +
                                                  std::to_string(d_a) + "*" + std::to_string(d_b));
  }
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(d_a, d_a);
    for (Eigen::Index i = 0; i < d_a; ++i)
      for (Eigen::Index j = 0; j < d_a; ++j)
        for (Eigen::Index k = 0; k < d_b; ++k) out(i, j) += m(i * d_b + k, j * d_b + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d_b, d_b);
  for (Eigen::Index k = 0; k < d_b; ++k)
    for (Eigen::Index l = 0; l < d_b; ++l)
      for (Eigen::Index i = 0; i < d_a; ++i) out(k, l) += m(i * d_b + k, i * d_b + l);
  return out;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  require_square(m, "is_unitary input");
  if (m.size() == 0) return true;
  if (!all_finite(m)) return false;
  const ComplexMatrix gram = m.adjoint() * m;
  return (gram - ComplexMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "matmul: " + std::to_string(a.cols()) + " columns vs " +
                                                  std::to_string(b.rows()) + " rows");
  }
  return a * b;
}

ComplexVector apply_to_vector(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "apply_to_vector: " + std::to_string(m.cols()) +
                                                  " columns vs vector of " + std::to_string(v.size()));
  }
  return m * v;
}

double reconstruction_error(const SpectralDecomposition& s, const ComplexMatrix& m) {
  const ComplexMatrix rebuilt =
      s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  const double scale = m.norm();
  const double err = (rebuilt - m).norm();
  return scale > 0.0 ? err / scale : err;
}

ComplexMatrix permutation_matrix(std::span<const int> perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  std::vector<bool> seen(perm.size(), false);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int target = perm[static_cast<std::size_t>(j)];
    if (target < 0 || target >= n || seen[static_cast<std::size_t>(target)]) {
      throw Error(ErrorKind::DimensionMismatch, "permutation_matrix: not a permutation");
    }
    seen[static_cast<std::size_t>(target)] = true;
    out(target, j) = 1.0;
  }
  return out;
}

}  // namespace qfluct
