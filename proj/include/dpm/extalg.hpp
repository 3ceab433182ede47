#pragma once

// Exterior algebra over l2(E) for small E. Used as an independent oracle for
// determinant-based probability formulas.

#include <map>

#include "dpm/kernel.hpp"

namespace dpm {

/// Sparse multivector: coefficient per basis element θ_A, keyed by the mask A.
/// θ_A is the wedge of the elements of A in ascending ground order. Mixed
/// grades are allowed.
class Multivector {
 public:
  using Terms = std::map<Subset, Complex>;

  Multivector() = default;
  explicit Multivector(GroundSet ground) : ground_(std::move(ground)) {}
  Multivector(GroundSet ground, Terms terms) : ground_(std::move(ground)) {
    for (const auto& [a, c] : terms) add(a, c);
  }

  static Multivector scalar(GroundSet ground, Complex c = 1.0) {
    Multivector m(std::move(ground));
    m.add(0, c);
    return m;
  }
  static Multivector theta(GroundSet ground, Subset a, Complex c = 1.0) {
    Multivector m(std::move(ground));
    m.add(a, c);
    return m;
  }
  // 1-vector Σ v_e e.
  static Multivector vector(GroundSet ground, const Vector& v) {
    if (static_cast<std::size_t>(v.size()) != ground.size()) throw StructuralError("1-vector length mismatch");
    Multivector m(std::move(ground));
    for (Eigen::Index i = 0; i < v.size(); ++i) m.add(singleton(static_cast<std::size_t>(i)), v[i]);
    return m;
  }

  const GroundSet& ground() const { return ground_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  Complex coefficient(Subset a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? Complex{} : it->second;
  }

  // Adds c θ_a, dropping the term if it cancels.
  void add(Subset a, Complex c) {
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (std::abs(it->second) < kPrune) terms_.erase(it);
    }
  }

  // Single grade when all terms share one cardinality.
  bool homogeneous(int* grade = nullptr) const {
    int g = -1;
    for (const auto& [a, c] : terms_) {
      if (g >= 0 && popcount(a) != g) return false;
      g = popcount(a);
    }
    if (grade) *grade = g < 0 ? 0 : g;
    return true;
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [a, c] : terms_) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  Multivector& operator+=(const Multivector& o) {
    require_same_ground(ground_, o.ground_, "multivector sum");
    for (const auto& [a, c] : o.terms_) add(a, c);
    return *this;
  }
  Multivector& operator-=(const Multivector& o) { return *this += o * Complex{-1.0}; }
  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(const Multivector& m, Complex s) {
    Multivector out(m.ground_);
    for (const auto& [a, c] : m.terms_) out.add(a, c * s);
    return out;
  }
  friend Multivector operator*(Complex s, const Multivector& m) { return m * s; }

  // Coefficients below this are treated as cancelled.
  static constexpr double kPrune = 1e-15;

 private:
  GroundSet ground_;
  Terms terms_;
};

// ⟨u, v⟩, linear in u and conjugate-linear in v.
inline Complex inner(const Multivector& u, const Multivector& v) {
  require_same_ground(u.ground(), v.ground(), "multivector inner product");
  Complex s{};
  for (const auto& [a, c] : u.terms()) s += c * std::conj(v.coefficient(a));
  return s;
}

namespace detail {

// Sign of θ_a ∧ θ_b relative to θ_{a ∪ b} (a, b disjoint): parity of pairs
// (i in a, j in b) with i > j.
inline int merge_sign(Subset a, Subset b) {
  int inversions = 0;
  while (b != 0) {
    const int j = std::countr_zero(b);
    inversions += popcount(a >> (j + 1));
    b &= b - 1;
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace detail

inline Multivector wedge(const Multivector& u, const Multivector& v) {
  require_same_ground(u.ground(), v.ground(), "wedge");
  Multivector out(u.ground());
  for (const auto& [a, ca] : u.terms()) {
    for (const auto& [b, cb] : v.terms()) {
      if ((a & b) != 0) continue;
      out.add(a | b, static_cast<double>(detail::merge_sign(a, b)) * ca * cb);
    }
  }
  return out;
}

/// Interior product u ∨ v, the adjoint of w -> w ∧ v:
/// ⟨u ∨ v, w⟩ = ⟨u, w ∧ v⟩. Conjugate-linear in v.
inline Multivector interior(const Multivector& u, const Multivector& v) {
  require_same_ground(u.ground(), v.ground(), "interior");
  Multivector out(u.ground());
  for (const auto& [a, ca] : u.terms()) {
    for (const auto& [b, cb] : v.terms()) {
      if (!is_subset(b, a)) continue;
      const Subset rest = a & ~b;
      out.add(rest, static_cast<double>(detail::merge_sign(rest, b)) * ca * std::conj(cb));
    }
  }
  return out;
}

/// ξ_H as the wedge of the orthonormal basis columns (defined up to a
/// unit-modulus factor). Rank 0 gives the scalar 1.
inline Multivector xi(const Subspace& h) {
  require_enumerable(h.size(), kMaxEnumerate, "xi");
  Multivector out = Multivector::scalar(h.ground());
  for (Eigen::Index j = 0; j < h.basis().cols(); ++j)
    out = wedge(out, Multivector::vector(h.ground(), h.basis().col(j)));
  return out;
}

namespace detail {

// ∧_{e in a} f(e) in ascending order of e.
template <class F>
Multivector wedge_over(const GroundSet& g, Subset a, F&& f) {
  Multivector out = Multivector::scalar(g);
  for (auto e : elements(a)) out = wedge(out, Multivector::vector(g, f(e)));
  return out;
}

}  // namespace detail

/// Orthogonal projection onto Ext(H), applied termwise: each θ_A maps to the
/// wedge of the projected factors.
inline Multivector lifted_projection(const Subspace& h, const Multivector& u) {
  require_same_ground(h.ground(), u.ground(), "lifted_projection");
  const Matrix p = h.projection();
  Multivector out(h.ground());
  for (const auto& [a, c] : u.terms())
    out += c * detail::wedge_over(h.ground(), a, [&](std::size_t e) -> Vector { return p.col(static_cast<Eigen::Index>(e)); });
  return out;
}

/// P[A ⊆ S, B ∩ S = ∅] as ⟨∧_A P_H e ∧ ∧_B P_H⊥ e, θ_A ∧ θ_B⟩.
inline double oracle_cylinder(const Subspace& h, Subset include, Subset exclude) {
  if (h.size() > 12) throw CapacityError("oracle_cylinder: ground size exceeds 12");
  if ((include & exclude) != 0) return 0.0;
  const GroundSet& g = h.ground();
  const auto n = static_cast<Eigen::Index>(h.size());
  const Matrix p = h.projection();
  const Matrix pperp = Matrix::Identity(n, n) - p;
  const Multivector left = wedge(
      detail::wedge_over(g, include, [&](std::size_t e) -> Vector { return p.col(static_cast<Eigen::Index>(e)); }),
      detail::wedge_over(g, exclude, [&](std::size_t e) -> Vector { return pperp.col(static_cast<Eigen::Index>(e)); }));
  const Multivector right = wedge(Multivector::theta(g, include), Multivector::theta(g, exclude));
  return inner(left, right).real();
}

}  // namespace dpm
