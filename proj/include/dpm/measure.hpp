#pragma once

// Exact probabilities of determinantal measures: cylinder determinants,
// full enumeration over 2^E, base probabilities from coordinatizations.

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "dpm/kernel.hpp"

namespace dpm {

inline constexpr std::size_t kMaxCylinder = 25;

/// Probability mass over all subsets of a ground set, indexed by bit mask.
/// `samples` is the number of draws behind an empirical table (0 if exact).
class DistributionTable {
 public:
  DistributionTable() = default;
  DistributionTable(GroundSet ground, std::vector<double> mass, std::size_t samples = 0)
      : ground_(std::move(ground)), mass_(std::move(mass)), samples_(samples) {
    require_enumerable(ground_.size(), kMaxEnumerate, "distribution table");
    if (mass_.size() != (std::size_t{1} << ground_.size()))
      throw StructuralError("distribution table needs 2^|E| entries");
    double total = 0.0;
    for (auto& m : mass_) {
      if (!(m >= -1e-12)) throw ConsistencyError("negative mass " + std::to_string(m) + " in distribution table");
      m = std::max(m, 0.0);
      total += m;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ConsistencyError("distribution table sums to " + std::to_string(total));
  }

  // Point mass on one subset.
  static DistributionTable point(GroundSet ground, Subset s) {
    std::vector<double> mass(std::size_t{1} << ground.size(), 0.0);
    mass.at(s) = 1.0;
    return DistributionTable(std::move(ground), std::move(mass));
  }

  const GroundSet& ground() const { return ground_; }
  const std::vector<double>& mass() const { return mass_; }
  double operator[](Subset s) const { return mass_[s]; }
  std::size_t size() const { return ground_.size(); }
  std::size_t samples() const { return samples_; }

  double probability(const std::function<bool(Subset)>& event) const {
    double p = 0.0;
    for (Subset s = 0; s < mass_.size(); ++s)
      if (mass_[s] != 0.0 && event(s)) p += mass_[s];
    return p;
  }

  // P[include ⊆ S, exclude ∩ S = ∅] by summation.
  double cylinder(Subset include, Subset exclude) const {
    return probability([&](Subset s) { return is_subset(include, s) && (s & exclude) == 0; });
  }

  // Law of E \ S.
  DistributionTable complement_pushforward() const {
    std::vector<double> out(mass_.size(), 0.0);
    const Subset all = ground_.all();
    for (Subset s = 0; s < mass_.size(); ++s) out[all & ~s] = mass_[s];
    return DistributionTable(ground_, std::move(out), samples_);
  }

  // Law of S ∩ keep, on the restricted ground set.
  DistributionTable marginal(Subset keep) const {
    keep &= ground_.all();
    std::vector<double> out(std::size_t{1} << popcount(keep), 0.0);
    for (Subset s = 0; s < mass_.size(); ++s) out[compress(s, keep)] += mass_[s];
    return DistributionTable(ground_.restrict(keep), std::move(out));
  }

  // Law of S \ (A ∪ B) given A ⊆ S, B ∩ S = ∅, on the ground E \ (A ∪ B).
  DistributionTable conditional(const ConditionSpec& spec, double min_probability = 0.0) const {
    spec.check();
    const double p = cylinder(spec.include, spec.exclude);
    if (p <= min_probability) throw ImpossibleEventError("conditioning event has probability " + std::to_string(p));
    const Subset rest = ground_.all() & ~spec.touched();
    std::vector<double> out(std::size_t{1} << popcount(rest), 0.0);
    for (Subset s = 0; s < mass_.size(); ++s) {
      if (is_subset(spec.include, s) && (s & spec.exclude) == 0) out[compress(s, rest)] += mass_[s] / p;
    }
    return DistributionTable(ground_.restrict(rest), std::move(out));
  }

 private:
  GroundSet ground_;
  std::vector<double> mass_;
  std::size_t samples_ = 0;
};

/// r x |E| matrix of full row rank whose row space is H.
class CoordinatizationMatrix {
 public:
  CoordinatizationMatrix(GroundSet ground, Matrix rows) : ground_(std::move(ground)), rows_(std::move(rows)) {
    if (static_cast<std::size_t>(rows_.cols()) != ground_.size())
      throw StructuralError("coordinatization matrix needs one column per ground element");
    const auto span = linalg::orthonormal_span(rows_.transpose());
    if (span.cols() != rows_.rows()) throw ValidationError("coordinatization matrix is not of full row rank");
  }
  const GroundSet& ground() const { return ground_; }
  const Matrix& rows() const { return rows_; }
  std::size_t rank() const { return static_cast<std::size_t>(rows_.rows()); }

  // Subspace spanned by the rows, as vectors in l2(E). Columns of M* span
  // the conjugate of the row space; use the plain transpose to keep
  // |det M_B|^2 equal to the base probability.
  Subspace row_space() const { return Subspace::span(ground_, rows_.transpose()); }

 private:
  GroundSet ground_;
  Matrix rows_;
};

namespace detail {

// Real part of a probability-valued determinant after sanity checks.
inline double checked_probability(Complex det, const char* what) {
  if (std::abs(det.imag()) > 1e-9)
    throw ConsistencyError(std::string(what) + ": determinant has imaginary part " + std::to_string(det.imag()));
  if (det.real() < -1e-8 || det.real() > 1.0 + 1e-8)
    throw ConsistencyError(std::string(what) + ": determinant " + std::to_string(det.real()) + " outside [0,1]");
  return std::clamp(det.real(), 0.0, 1.0);
}

// det(Q^B restricted to A ∪ B): rows of excluded elements are replaced by
// the corresponding rows of I - Q.
inline Complex incexc_determinant(const Matrix& q, Subset include, Subset exclude) {
  const auto idx = elements(include | exclude);
  Matrix m = linalg::principal(q, idx);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (!contains(exclude, idx[i])) continue;
    const auto r = static_cast<Eigen::Index>(i);
    m.row(r) = -m.row(r);
    m(r, r) += 1.0;
  }
  return linalg::determinant(m);
}

}  // namespace detail

inline double cylinder_prob(const Kernel& kernel, Subset include, Subset exclude) {
  if ((include & exclude) != 0) throw DomainError("cylinder_prob: include and exclude overlap");
  if (((include | exclude) & ~kernel.ground().all()) != 0) throw StructuralError("cylinder_prob: subset outside ground");
  if (static_cast<std::size_t>(popcount(include | exclude)) > kMaxCylinder)
    throw CapacityError("cylinder_prob: more than 25 constrained elements");
  return detail::checked_probability(detail::incexc_determinant(kernel.entries(), include, exclude), "cylinder_prob");
}

// Each mass is its own determinant; no recursion shared with the sampler.
inline DistributionTable enumerate(const Kernel& kernel) {
  require_enumerable(kernel.size(), kMaxEnumerate, "enumerate");
  const Subset all = kernel.ground().all();
  std::vector<double> mass(std::size_t{1} << kernel.size());
  for (Subset s = 0; s < mass.size(); ++s)
    mass[s] = detail::checked_probability(detail::incexc_determinant(kernel.entries(), s, all & ~s), "enumerate");
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-8) throw ConsistencyError("enumerated masses sum to " + std::to_string(total));
  // Renormalise the float residue so the table invariant (1e-9) holds.
  for (auto& m : mass) m /= total;
  return DistributionTable(kernel.ground(), std::move(mass));
}

inline DistributionTable enumerate(const Subspace& h) {
  return enumerate(Kernel(h.ground(), h.projection(), h.tolerance()));
}

// |det M_B|^2 / det(M M*).
inline double base_prob_from_matrix(const CoordinatizationMatrix& m, Subset base) {
  if (static_cast<std::size_t>(popcount(base)) != m.rank()) return 0.0;
  const Matrix& rows = m.rows();
  const auto idx = elements(base);
  Matrix minor(rows.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) minor.col(static_cast<Eigen::Index>(j)) = rows.col(static_cast<Eigen::Index>(idx[j]));
  const double num = std::norm(linalg::determinant(minor));
  const double den = linalg::determinant(rows * rows.adjoint()).real();
  return num / den;
}

inline double entropy(const DistributionTable& table) {
  double h = 0.0;
  for (double p : table.mass())
    if (p > 0.0) h -= p * std::log(p);
  return std::max(h, 0.0);
}

inline double entropy(const Kernel& kernel) { return entropy(enumerate(kernel)); }

inline double tv_distance(const DistributionTable& p, const DistributionTable& q) {
  require_same_ground(p.ground(), q.ground(), "tv_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < p.mass().size(); ++i) d += std::abs(p.mass()[i] - q.mass()[i]);
  return std::min(d / 2.0, 1.0);
}

struct CountStats {
  double mean = 0.0;
  std::vector<double> pmf;  // pmf[k] = P[|S ∩ A| = k]
};

inline CountStats marginal_count_stats(const Kernel& kernel, Subset a) {
  require_enumerable(kernel.size(), kMaxEnumerate, "marginal_count_stats");
  a &= kernel.ground().all();
  CountStats out;
  for (auto e : elements(a)) out.mean += kernel(e, e).real();
  out.pmf.assign(static_cast<std::size_t>(popcount(a)) + 1, 0.0);
  const auto table = enumerate(kernel);
  for (Subset s = 0; s < table.mass().size(); ++s) out.pmf[static_cast<std::size_t>(popcount(s & a))] += table[s];
  double pmf_mean = 0.0;
  for (std::size_t k = 0; k < out.pmf.size(); ++k) pmf_mean += static_cast<double>(k) * out.pmf[k];
  if (std::abs(pmf_mean - out.mean) > 1e-9)
    throw ConsistencyError("count mean from pmf " + std::to_string(pmf_mean) + " differs from kernel trace " +
                           std::to_string(out.mean));
  return out;
}

}  // namespace dpm
