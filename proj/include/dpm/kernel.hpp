#pragma once

// Value types for determinantal kernels and the subspaces that induce them.

#include <string>
#include <utility>

#include "dpm/core.hpp"
#include "dpm/linalg.hpp"

namespace dpm {

/// Square complex matrix Q over a labelled ground set. Entry (e, f) is the
/// (e, f) entry of the operator matrix, so P[A ⊆ S] = det(Q restricted to A).
///
/// A Kernel may hold an invalid matrix (so that `validate` can report on it);
/// operations that need a positive contraction call `require_valid`.
class Kernel {
 public:
  Kernel() = default;
  Kernel(GroundSet ground, Matrix entries, double tolerance = kDefaultTolerance)
      : ground_(std::move(ground)), entries_(std::move(entries)), tolerance_(tolerance) {
    if (entries_.rows() != entries_.cols())
      throw StructuralError("kernel matrix is not square");
    if (static_cast<std::size_t>(entries_.rows()) != ground_.size())
      throw StructuralError("kernel dimension " + std::to_string(entries_.rows()) +
                            " does not match ground size " + std::to_string(ground_.size()));
    if (!(tolerance_ >= 0.0)) throw DomainError("tolerance must be nonnegative");
  }

  // Kernel on e1..en.
  explicit Kernel(const Matrix& entries, double tolerance = kDefaultTolerance)
      : Kernel(GroundSet::numbered(static_cast<std::size_t>(entries.rows())), entries, tolerance) {}

  const GroundSet& ground() const { return ground_; }
  const Matrix& entries() const { return entries_; }
  double tolerance() const { return tolerance_; }
  std::size_t size() const { return ground_.size(); }
  Complex operator()(std::size_t e, std::size_t f) const {
    return entries_(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f));
  }

  Kernel with_tolerance(double tol) const { return Kernel(ground_, entries_, tol); }

  // Principal submatrix on `keep`.
  Kernel restrict(Subset keep) const {
    return Kernel(ground_.restrict(keep), linalg::principal(entries_, elements(keep & ground_.all())), tolerance_);
  }

 private:
  GroundSet ground_;
  Matrix entries_;
  double tolerance_ = kDefaultTolerance;
};

struct ValidationReport {
  double hermitian_defect = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  RealVector eigenvalues;
  bool pass = false;
};

inline ValidationReport validate(const Kernel& kernel) {
  ValidationReport r;
  r.hermitian_defect = linalg::hermitian_defect(kernel.entries());
  r.eigenvalues = linalg::hermitian_eigen(kernel.entries()).values;
  if (r.eigenvalues.size() > 0) {
    r.min_eigenvalue = r.eigenvalues.minCoeff();
    r.max_eigenvalue = r.eigenvalues.maxCoeff();
  }
  const double tol = kernel.tolerance();
  r.pass = r.hermitian_defect <= tol && r.min_eigenvalue >= -tol && r.max_eigenvalue <= 1.0 + tol;
  return r;
}

inline const Kernel& require_valid(const Kernel& kernel, const char* what = "kernel") {
  const auto r = validate(kernel);
  if (!r.pass) {
    throw ValidationError(std::string(what) + " is not a positive contraction (hermitian defect " +
                          std::to_string(r.hermitian_defect) + ", eigenvalues in [" +
                          std::to_string(r.min_eigenvalue) + ", " + std::to_string(r.max_eigenvalue) + "])");
  }
  return kernel;
}

/// Closed subspace H of l2(E), held as a matrix whose orthonormal columns span H.
class Subspace {
 public:
  Subspace() = default;
  Subspace(GroundSet ground, Matrix basis, double tolerance = kDefaultTolerance)
      : ground_(std::move(ground)), basis_(std::move(basis)), tolerance_(tolerance) {
    if (static_cast<std::size_t>(basis_.rows()) != ground_.size())
      throw StructuralError("subspace basis has " + std::to_string(basis_.rows()) +
                            " rows for a ground set of size " + std::to_string(ground_.size()));
    const auto r = basis_.cols();
    const double defect = linalg::max_abs(basis_.adjoint() * basis_ - Matrix::Identity(r, r));
    if (defect > std::max(tolerance_, 1e-12) * 10.0)
      throw ValidationError("subspace basis is not orthonormal (defect " + std::to_string(defect) + ")");
  }

  // Span of arbitrary column vectors.
  static Subspace span(GroundSet ground, const Matrix& vectors, double tolerance = kDefaultTolerance) {
    return Subspace(std::move(ground), linalg::orthonormal_span(vectors), tolerance);
  }
  static Subspace coordinate(GroundSet ground, Subset a) {
    const auto n = ground.size();
    return Subspace(std::move(ground), linalg::coordinate_span(n, a));
  }

  const GroundSet& ground() const { return ground_; }
  const Matrix& basis() const { return basis_; }
  std::size_t rank() const { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t size() const { return ground_.size(); }
  double tolerance() const { return tolerance_; }

  Matrix projection() const { return basis_ * basis_.adjoint(); }
  Vector project(const Vector& v) const { return basis_ * (basis_.adjoint() * v); }

  Subspace complement() const { return Subspace(ground_, linalg::complement(basis_), tolerance_); }
  Subspace operator+(const Subspace& other) const {
    require_same_ground(ground_, other.ground_, "subspace sum");
    return Subspace(ground_, linalg::sum(basis_, other.basis_), tolerance_);
  }
  Subspace intersect(const Subspace& other) const {
    require_same_ground(ground_, other.ground_, "subspace intersection");
    return Subspace(ground_, linalg::intersection(basis_, other.basis_), tolerance_);
  }

 private:
  GroundSet ground_;
  Matrix basis_;
  double tolerance_ = kDefaultTolerance;
};

/// Condition A ⊆ S (include) and B ∩ S = ∅ (exclude).
struct ConditionSpec {
  Subset include = 0;
  Subset exclude = 0;

  void check() const {
    if ((include & exclude) != 0) throw DomainError("condition include and exclude sets overlap");
  }
  Subset touched() const { return include | exclude; }
};

}  // namespace dpm
