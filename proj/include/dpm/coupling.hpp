#pragma once

// Couplings of determinantal measures: monotone couplings by max-flow,
// disjoint couplings with a prescribed union law and complete couplings of
// the character measures on Z_n by LP feasibility.

#include <map>
#include <optional>

#include "dpm/events.hpp"
#include "dpm/kernels.hpp"
#include "dpm/lp.hpp"
#include "dpm/measure.hpp"

namespace dpm {

inline constexpr double kCouplingTolerance = 1e-7;
inline constexpr double kSupportFloor = 1e-12;

/// Joint law of a pair of random subsets of one ground set.
class CouplingTable {
 public:
  using Key = std::pair<Subset, Subset>;

  CouplingTable() = default;
  explicit CouplingTable(GroundSet ground) : ground_(std::move(ground)) {}

  void add(Subset a, Subset b, double mass) {
    if (mass <= 0.0) return;
    mass_[{a, b}] += mass;
  }

  const GroundSet& ground() const { return ground_; }
  const std::map<Key, double>& mass() const { return mass_; }

  std::vector<double> first_marginal() const {
    std::vector<double> out(std::size_t{1} << ground_.size(), 0.0);
    for (const auto& [k, m] : mass_) out[k.first] += m;
    return out;
  }
  std::vector<double> second_marginal() const {
    std::vector<double> out(std::size_t{1} << ground_.size(), 0.0);
    for (const auto& [k, m] : mass_) out[k.second] += m;
    return out;
  }
  std::vector<double> union_marginal() const {
    std::vector<double> out(std::size_t{1} << ground_.size(), 0.0);
    for (const auto& [k, m] : mass_) out[k.first | k.second] += m;
    return out;
  }
  double mass_where(const std::function<bool(Subset, Subset)>& pred) const {
    double s = 0.0;
    for (const auto& [k, m] : mass_)
      if (pred(k.first, k.second)) s += m;
    return s;
  }

 private:
  GroundSet ground_;
  std::map<Key, double> mass_;
};

// Law on bijections {0..n-1} -> Z_n; perm[k] is the element carried by frequency k.
struct PermutationLaw {
  std::vector<std::pair<std::vector<std::size_t>, double>> atoms;
};

struct FeasibilityResult {
  bool feasible = false;
  std::optional<CouplingTable> witness;
  std::optional<PermutationLaw> permutations;
  double max_violation = 0.0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
};

namespace detail {

inline double marginal_gap(const std::vector<double>& got, const std::vector<double>& want) {
  double g = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) g = std::max(g, std::abs(got[i] - want[i]));
  return g;
}

inline std::vector<Subset> support_of(const DistributionTable& t) {
  std::vector<Subset> out;
  for (Subset s = 0; s < t.mass().size(); ++s)
    if (t[s] >= kSupportFloor) out.push_back(s);
  return out;
}

}  // namespace detail

/// Strassen: p ≼ q iff a coupling on pairs A ⊆ B exists. Bipartite network
/// source -> A (capacity p(A)) -> B when A ⊆ B -> sink (capacity q(B)).
inline FeasibilityResult check_domination(const DistributionTable& p, const DistributionTable& q) {
  require_same_ground(p.ground(), q.ground(), "check_domination");
  require_enumerable(p.size(), 12, "check_domination");
  const auto left = detail::support_of(p);
  const auto right = detail::support_of(q);
  const std::size_t source = 0, sink = 1;
  lp::MaxFlow net(2 + left.size() + right.size());
  std::vector<std::tuple<std::size_t, Subset, Subset>> middle;
  for (std::size_t i = 0; i < left.size(); ++i) net.add_arc(source, 2 + i, p[left[i]]);
  for (std::size_t j = 0; j < right.size(); ++j) net.add_arc(2 + left.size() + j, sink, q[right[j]]);
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j)
      if (is_subset(left[i], right[j])) middle.emplace_back(net.add_arc(2 + i, 2 + left.size() + j, 2.0), left[i], right[j]);
  const double flow = net.run(source, sink);

  FeasibilityResult out;
  out.variables = middle.size();
  out.constraints = left.size() + right.size();
  CouplingTable w(p.ground());
  for (const auto& [arc, a, b] : middle) w.add(a, b, net.flow(arc));
  out.max_violation = std::max(detail::marginal_gap(w.first_marginal(), p.mass()),
                               detail::marginal_gap(w.second_marginal(), q.mass()));
  out.feasible = flow >= 1.0 - 1e-9 && out.max_violation <= kCouplingTolerance;
  out.witness = std::move(w);
  return out;
}

/// Brute-force Strassen check on small grounds: p(A) <= q(A) for every
/// increasing event A on the whole ground set.
inline bool dominates_by_events(const DistributionTable& p, const DistributionTable& q, double tol = 1e-9) {
  require_same_ground(p.ground(), q.ground(), "dominates_by_events");
  for (const auto& ev : enumerate_increasing_events(p.ground().all())) {
    double pa = 0.0, qa = 0.0;
    for (Subset s = 0; s < p.mass().size(); ++s) {
      if (!ev.contains(s)) continue;
      pa += p[s];
      qa += q[s];
    }
    if (pa > qa + tol) return false;
  }
  return true;
}

struct UnionCouplingOptions {
  // Only admit pairs (A1, A2) with A1 ∩ A2 = ∅.
  bool disjoint_only = true;
};

/// LP search for a coupling of p1 and p2 whose union A1 ∪ A2 has law p_union.
inline FeasibilityResult find_disjoint_union_coupling(const DistributionTable& p1, const DistributionTable& p2,
                                                      const DistributionTable& p_union,
                                                      UnionCouplingOptions options = {}) {
  require_same_ground(p1.ground(), p2.ground(), "find_disjoint_union_coupling");
  require_same_ground(p1.ground(), p_union.ground(), "find_disjoint_union_coupling");
  require_enumerable(p1.size(), 9, "find_disjoint_union_coupling");
  const auto s1 = detail::support_of(p1);
  const auto s2 = detail::support_of(p2);
  const auto su = detail::support_of(p_union);
  std::map<Subset, std::size_t> row1, row2, rowu;
  for (auto s : s1) row1.emplace(s, row1.size());
  for (auto s : s2) row2.emplace(s, s1.size() + row2.size());
  for (auto s : su) rowu.emplace(s, s1.size() + s2.size() + rowu.size());

  lp::FeasibilityProblem prob;
  prob.rows = s1.size() + s2.size() + su.size();
  for (auto s : s1) prob.rhs.push_back(p1[s]);
  for (auto s : s2) prob.rhs.push_back(p2[s]);
  for (auto s : su) prob.rhs.push_back(p_union[s]);
  std::vector<CouplingTable::Key> keys;
  for (auto a : s1) {
    for (auto b : s2) {
      if (options.disjoint_only && (a & b) != 0) continue;
      auto u = rowu.find(a | b);
      if (u == rowu.end()) continue;  // union law puts no mass there
      prob.columns.push_back({{{row1[a], 1.0}, {row2[b], 1.0}, {u->second, 1.0}}});
      keys.emplace_back(a, b);
    }
  }
  const auto res = lp::phase_one(prob, kCouplingTolerance);

  FeasibilityResult out;
  out.variables = keys.size();
  out.constraints = prob.rows;
  CouplingTable w(p1.ground());
  for (std::size_t j = 0; j < keys.size(); ++j) w.add(keys[j].first, keys[j].second, res.x[j]);
  // re-check against the full tables, independent of the LP bookkeeping
  out.max_violation = std::max({detail::marginal_gap(w.first_marginal(), p1.mass()),
                                detail::marginal_gap(w.second_marginal(), p2.mass()),
                                detail::marginal_gap(w.union_marginal(), p_union.mass())});
  out.feasible = res.feasible && out.max_violation <= kCouplingTolerance;
  if (!out.feasible) out.max_violation = std::max(out.max_violation, res.infeasibility);
  out.witness = std::move(w);
  return out;
}

inline FeasibilityResult find_disjoint_union_coupling(const Subspace& h1, const Subspace& h2, UnionCouplingOptions options = {}) {
  return find_disjoint_union_coupling(enumerate(h1), enumerate(h2), enumerate(h1 + h2), options);
}

namespace detail {

inline std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p); while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Subset image(const std::vector<std::size_t>& perm, Subset j) {
  Subset out = 0;
  for (auto k : elements(j)) out |= singleton(perm[k]);
  return out;
}

}  // namespace detail

/// LP search for a random bijection σ (frequency k -> element of Z_n) such
/// that σ(J) has law P^{H_J} for every set of frequencies J.
inline FeasibilityResult complete_coupling_zn(std::size_t n) {
  if (n < 1 || n > 6) throw DomainError("complete_coupling_zn: n must lie in 1..6");
  const Subset all = full_subset(n);
  std::vector<DistributionTable> laws;
  for (Subset j = 0; j <= all; ++j) laws.push_back(enumerate(zn_character(n, j)));

  const auto perms = detail::permutations(n);
  // variables: bijections whose every partial image has positive mass
  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    bool ok = true;
    for (Subset j = 1; j < all && ok; ++j) ok = laws[j][detail::image(perms[i], j)] >= kSupportFloor;
    if (ok) vars.push_back(i);
  }
  // rows: (J, C) for proper nonempty J and C in the support of P^{H_J}, plus Σ μ = 1
  lp::FeasibilityProblem prob;
  std::map<std::pair<Subset, Subset>, std::size_t> rows;
  prob.rows = 1;
  prob.rhs.push_back(1.0);
  for (Subset j = 1; j < all; ++j)
    for (Subset c = 0; c <= all; ++c)
      if (laws[j][c] >= kSupportFloor) {
        rows.emplace(std::make_pair(j, c), prob.rows++);
        prob.rhs.push_back(laws[j][c]);
      }
  for (auto i : vars) {
    lp::Column col;
    col.entries.emplace_back(0, 1.0);
    for (Subset j = 1; j < all; ++j) col.entries.emplace_back(rows.at({j, detail::image(perms[i], j)}), 1.0);
    prob.columns.push_back(std::move(col));
  }
  const auto res = lp::phase_one(prob, kCouplingTolerance);

  FeasibilityResult out;
  out.variables = vars.size();
  out.constraints = prob.rows;
  PermutationLaw law;
  for (std::size_t k = 0; k < vars.size(); ++k)
    if (res.x[k] > 0.0) law.atoms.emplace_back(perms[vars[k]], res.x[k]);
  // independent check over every J, including zero-mass cells
  double worst = 0.0;
  for (Subset j = 0; j <= all; ++j) {
    std::vector<double> got(std::size_t{1} << n, 0.0);
    for (const auto& [perm, m] : law.atoms) got[detail::image(perm, j)] += m;
    worst = std::max(worst, detail::marginal_gap(got, laws[j].mass()));
  }
  out.max_violation = res.feasible ? worst : std::max(worst, res.infeasibility);
  out.feasible = res.feasible && worst <= kCouplingTolerance;
  out.permutations = std::move(law);
  return out;
}

struct Codim1Report {
  std::vector<double> difference_law;  // law of B' \ B over subsets
  double max_deviation = 0.0;          // against P^u on singletons
  double marginal_violation = 0.0;     // coupling marginals vs P^H, P^{H+[u]}
  bool pass = false;
};

/// For a monotone coupling of P^H and P^{H ⊕ [u]}, B' \ B is a single element
/// distributed as |u_e|^2.
inline Codim1Report codim1_coupling_check(const Subspace& h, const Vector& u, const CouplingTable& coupling) {
  require_same_ground(h.ground(), coupling.ground(), "codim1_coupling_check");
  if (static_cast<std::size_t>(u.size()) != h.size()) throw StructuralError("codim1_coupling_check: vector length mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw DomainError("codim1_coupling_check: u must be a unit vector");
  if (linalg::max_abs(h.basis().adjoint() * u) > 1e-9) throw DomainError("codim1_coupling_check: u must be orthogonal to H");
  const double crossing = coupling.mass_where([](Subset a, Subset b) { return !is_subset(a, b); });
  if (crossing > kCouplingTolerance) throw DomainError("codim1_coupling_check: coupling is not monotone");

  Codim1Report r;
  r.difference_law.assign(std::size_t{1} << h.size(), 0.0);
  for (const auto& [k, m] : coupling.mass()) r.difference_law[k.second & ~k.first] += m;
  for (Subset s = 0; s < r.difference_law.size(); ++s) {
    const double want = popcount(s) == 1 ? std::norm(u[std::countr_zero(s)]) : 0.0;
    r.max_deviation = std::max(r.max_deviation, std::abs(r.difference_law[s] - want));
  }
  const Subspace bigger = h + Subspace::span(h.ground(), u);
  r.marginal_violation = std::max(detail::marginal_gap(coupling.first_marginal(), enumerate(h).mass()),
                                  detail::marginal_gap(coupling.second_marginal(), enumerate(bigger).mass()));
  r.pass = r.max_deviation <= kCouplingTolerance && r.marginal_violation <= kCouplingTolerance;
  return r;
}

// Fraction of coupling mass on pairs with |B2 \ B1| = k.
inline double codimension_concentration(const CouplingTable& coupling, std::size_t k) {
  return coupling.mass_where([k](Subset a, Subset b) { return static_cast<std::size_t>(popcount(b & ~a)) == k; });
}

}  // namespace dpm
