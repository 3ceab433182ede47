#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dpm/core.hpp"

namespace dpm {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermitian_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline Complex determinant(const Matrix& m) {
  if (m.rows() == 0) return Complex{1.0, 0.0};
  return Eigen::PartialPivLU<Matrix>(m).determinant();
}

// Ascending eigenvalues and unitary eigenvectors of the Hermitian part of m.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};

inline HermitianEigen hermitian_eigen(const Matrix& m) {
  if (m.rows() == 0) return {RealVector(0), Matrix(0, 0)};
  const Matrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ConsistencyError("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// f applied to the spectrum of a Hermitian matrix.
template <class F>
Matrix spectral_apply(const HermitianEigen& eig, F&& f) {
  RealVector mapped = eig.values;
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped[i] = f(mapped[i]);
  return eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

// Orthonormal basis of the column span of `vectors`. Rank is decided by
// singular values above threshold * max(1, largest singular value).
inline Matrix orthonormal_span(const Matrix& vectors, double threshold = kRankThreshold) {
  const auto n = vectors.rows();
  if (vectors.cols() == 0 || n == 0) return Matrix(n, 0);
  Eigen::BDCSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = threshold * std::max(1.0, sv.size() ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of the orthogonal complement of span(basis); `basis`
// must already have orthonormal columns.
inline Matrix complement(const Matrix& basis, double threshold = kRankThreshold) {
  const auto n = basis.rows();
  const Matrix residual = Matrix::Identity(n, n) - basis * basis.adjoint();
  return orthonormal_span(residual, threshold);
}

inline Matrix sum(const Matrix& a, const Matrix& b, double threshold = kRankThreshold) {
  Matrix joined(a.rows(), a.cols() + b.cols());
  joined << a, b;
  return orthonormal_span(joined, threshold);
}

inline Matrix intersection(const Matrix& a, const Matrix& b, double threshold = kRankThreshold) {
  return complement(sum(complement(a, threshold), complement(b, threshold), threshold), threshold);
}

// Orthonormal basis of [A], the span of the coordinate vectors in A.
inline Matrix coordinate_span(std::size_t n, Subset a) {
  const auto idx = elements(a);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(idx[k]), static_cast<Eigen::Index>(k)) = 1.0;
  return out;
}

inline Matrix principal(const Matrix& m, const std::vector<std::size_t>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = m(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
  return out;
}

inline Matrix block(const Matrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

}  // namespace linalg
}  // namespace dpm
