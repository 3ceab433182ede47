#pragma once

// Kernel transformations (duals, conditioning, dilation, reweighting) and
// constructors for the standard kernels.

#include <cmath>
#include <numbers>
#include <set>

#include "dpm/kernel.hpp"
#include "dpm/measure.hpp"

namespace dpm {

inline Kernel projection_kernel(const Subspace& h) {
  return Kernel(h.ground(), h.projection(), h.tolerance());
}

inline Kernel dual(const Kernel& kernel) {
  require_valid(kernel);
  const auto n = static_cast<Eigen::Index>(kernel.size());
  return Kernel(kernel.ground(), Matrix::Identity(n, n) - kernel.entries(), kernel.tolerance());
}

namespace detail {

// Schur complement conditioning on A ⊆ S; result lives on E \ A.
inline Kernel condition_include(const Kernel& kernel, Subset a) {
  if (a == 0) return kernel;
  const Subset rest = kernel.ground().all() & ~a;
  const auto ia = elements(a);
  const auto ir = elements(rest);
  const Matrix& q = kernel.entries();
  const Matrix qaa = linalg::principal(q, ia);
  Eigen::FullPivLU<Matrix> lu(qaa);
  if (!lu.isInvertible()) throw ConsistencyError("singular kernel block on a positive-probability inclusion set");
  const Matrix qra = linalg::block(q, ir, ia);
  const Matrix qar = linalg::block(q, ia, ir);
  Matrix out = linalg::principal(q, ir) - qra * lu.solve(qar);
  return Kernel(kernel.ground().restrict(rest), std::move(out), kernel.tolerance());
}

inline Kernel complement_kernel(const Kernel& kernel) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  return Kernel(kernel.ground(), Matrix::Identity(n, n) - kernel.entries(), kernel.tolerance());
}

}  // namespace detail

/// Kernel of S \ A on E \ (A ∪ B) given A ⊆ S and B ∩ S = ∅. Inclusions are
/// a Schur complement; exclusions go through the dual kernel.
inline Kernel condition(const Kernel& kernel, const ConditionSpec& spec) {
  spec.check();
  if ((spec.touched() & ~kernel.ground().all()) != 0) throw StructuralError("condition: subset outside ground");
  require_valid(kernel);
  const double p = cylinder_prob(kernel, spec.include, spec.exclude);
  if (p <= kernel.tolerance())
    throw ImpossibleEventError("conditioning event has probability " + std::to_string(p));
  Kernel included = detail::condition_include(kernel, spec.include);
  if (spec.exclude == 0) return included;
  // exclude mask re-expressed on the reduced ground
  const Subset rest = kernel.ground().all() & ~spec.include;
  const Subset b = compress(spec.exclude, rest);
  return detail::complement_kernel(detail::condition_include(detail::complement_kernel(included), b));
}

/// H_{A,B} = ((H ∩ A⊥) + [A ∪ B]) ∩ B⊥ by explicit subspace arithmetic.
inline Subspace subspace_condition(const Subspace& h, const ConditionSpec& spec) {
  spec.check();
  const GroundSet& g = h.ground();
  const Subset all = g.all();
  if ((spec.touched() & ~all) != 0) throw StructuralError("subspace_condition: subset outside ground");
  const double p = cylinder_prob(projection_kernel(h), spec.include, spec.exclude);
  if (p <= h.tolerance()) throw ImpossibleEventError("conditioning event has probability " + std::to_string(p));
  const Subspace a_perp = Subspace::coordinate(g, all & ~spec.include);
  const Subspace ab = Subspace::coordinate(g, spec.touched());
  const Subspace b_perp = Subspace::coordinate(g, all & ~spec.exclude);
  return (h.intersect(a_perp) + ab).intersect(b_perp);
}

inline std::string hat_label(const GroundSet& ground, const std::string& label) {
  std::string candidate = label + "^";
  std::set<std::string> used(ground.labels().begin(), ground.labels().end());
  while (used.count(candidate)) candidate += "^";
  return candidate;
}

/// Projection dilation of Q on E ∪ Ê: the range of [[Q, T T̂], [T T̂, I - Q]]
/// with T = Q^{1/2}, T̂ = (I - Q)^{1/2}. Its basis is the stacked [T; T̂].
inline Subspace dilate(const Kernel& kernel) {
  require_valid(kernel);
  const auto n = static_cast<Eigen::Index>(kernel.size());
  if (2 * kernel.size() > kMaxGround) throw CapacityError("dilate: doubled ground exceeds 62 elements");
  const auto eig = linalg::hermitian_eigen(kernel.entries());
  const Matrix t = linalg::spectral_apply(eig, [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); });
  const Matrix that = linalg::spectral_apply(eig, [](double x) { return std::sqrt(std::clamp(1.0 - x, 0.0, 1.0)); });
  Matrix basis(2 * n, n);
  basis << t, that;
  std::vector<std::string> labels = kernel.ground().labels();
  for (const auto& l : kernel.ground().labels()) labels.push_back(hat_label(kernel.ground(), l));
  return Subspace(GroundSet(std::move(labels)), std::move(basis), kernel.tolerance());
}

/// D_w H with D_w e = sqrt(w(e)) e.
inline Subspace reweight(const Subspace& h, const std::vector<double>& weights) {
  if (weights.size() != h.size()) throw StructuralError("reweight: one weight per ground element required");
  RealVector root(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("reweight: weights must be positive");
    root[static_cast<Eigen::Index>(i)] = std::sqrt(weights[i]);
  }
  const Matrix scaled = root.cast<Complex>().asDiagonal() * h.basis();
  return Subspace::span(h.ground(), scaled, h.tolerance());
}

// ---------------------------------------------------------------------------
// Kernel zoo

inline Kernel bernoulli(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli: p must lie in [0,1]");
  const auto m = static_cast<Eigen::Index>(n);
  return Kernel(Matrix(Matrix::Identity(m, m) * p));
}

inline Kernel diagonal_kernel(const std::vector<double>& p) {
  RealVector d(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw DomainError("diagonal kernel: entries must lie in [0,1]");
    d[static_cast<Eigen::Index>(i)] = p[i];
  }
  return Kernel(Matrix(d.cast<Complex>().asDiagonal()));
}

/// Principal n x n block of R(i, j) = (1 - a)/(1 + a) a^|i - j|.
inline Kernel renewal_truncated(std::size_t n, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("renewal kernel: a must lie in (0,1)");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix r(m, m);
  const double c = (1.0 - a) / (1.0 + a);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) r(i, j) = c * std::pow(a, static_cast<double>(std::abs(i - j)));
  Kernel out(std::move(r));
  require_valid(out, "renewal kernel");
  return out;
}

/// Truncated Toeplitz kernel T(i, j) = c_{i-j} with c_{-k} = conj(c_k), from the
/// Fourier coefficients c_0, c_1, ... of a symbol with values in [0, 1].
inline Kernel toeplitz_from_symbol(std::size_t n, const std::vector<Complex>& coefficients) {
  if (coefficients.empty()) throw DomainError("toeplitz: need at least c_0");
  if (std::abs(coefficients[0].imag()) > 1e-12) throw DomainError("toeplitz: c_0 must be real");
  // symbol sampled on a grid; the truncation is validated exactly below
  constexpr int kGrid = 4096;
  for (int g = 0; g < kGrid; ++g) {
    const double theta = 2.0 * std::numbers::pi * g / kGrid;
    double f = coefficients[0].real();
    for (std::size_t k = 1; k < coefficients.size(); ++k)
      f += 2.0 * (coefficients[k] * std::polar(1.0, static_cast<double>(k) * theta)).real();
    if (f < -1e-9 || f > 1.0 + 1e-9) throw DomainError("toeplitz: symbol leaves [0,1] at theta=" + std::to_string(theta));
  }
  const auto m = static_cast<Eigen::Index>(n);
  Matrix t = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto k = static_cast<std::size_t>(std::abs(i - j));
      if (k >= coefficients.size()) continue;
      t(i, j) = i >= j ? coefficients[k] : std::conj(coefficients[k]);
    }
  }
  Kernel out(std::move(t));
  require_valid(out, "toeplitz kernel");
  return out;
}

/// Projection onto span{m -> exp(2 pi i k m / n) : k in J} on Z_n.
inline Kernel zn_character(std::size_t n, Subset frequencies) {
  if (n == 0) throw DomainError("zn_character: n must be positive");
  if ((frequencies & ~full_subset(n)) != 0) throw DomainError("zn_character: frequency outside {0..n-1}");
  std::vector<std::string> labels;
  for (std::size_t m = 0; m < n; ++m) labels.push_back(std::to_string(m));
  const auto size = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Zero(size, size);
  for (auto k : elements(frequencies)) {
    for (Eigen::Index m = 0; m < size; ++m) {
      for (Eigen::Index mp = 0; mp < size; ++mp) {
        const auto phase = static_cast<double>((static_cast<long long>(k) * (m - mp)) % static_cast<long long>(n));
        q(m, mp) += std::polar(1.0 / static_cast<double>(n), 2.0 * std::numbers::pi * phase / static_cast<double>(n));
      }
    }
  }
  return Kernel(GroundSet(std::move(labels)), std::move(q));
}

}  // namespace dpm
