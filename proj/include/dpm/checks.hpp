#pragma once

// Exact-enumeration experiment suites. Theorem suites (negative association,
// conditional negative association, tail correlation, concentration) must
// never fail; conjecture probes (BK, entropy concavity) only flag candidates.

#include <optional>

#include "dpm/events.hpp"
#include "dpm/kernels.hpp"
#include "dpm/measure.hpp"
#include "dpm/random.hpp"

namespace dpm {

inline constexpr double kTheoremSlack = 1e-9;
inline constexpr double kProbeFlag = 1e-8;

/// Smallest instance that produced the worst margin, with enough data to
/// recompute it.
struct Counterexample {
  std::vector<Kernel> kernels;
  std::optional<DistributionTable> table;  // set when the law is not given by a kernel
  std::vector<IncreasingEvent> events;
  Subset k = 0;
  Subset f = 0;
  double margin = 0.0;
  std::string note;
};

struct CheckReport {
  std::string suite;
  bool theorem = true;  // false for conjecture probes
  std::size_t instances = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool pass = true;
  std::size_t flagged = 0;  // probe instances below -kProbeFlag
  std::uint64_t seed = 0;
  std::optional<Counterexample> counterexample;

  // Folds another report in, keeping the first worst instance.
  void merge(const CheckReport& other) {
    instances += other.instances;
    flagged += other.flagged;
    pass = pass && other.pass;
    if (other.worst_margin < worst_margin) {
      worst_margin = other.worst_margin;
      if (other.counterexample) counterexample = other.counterexample;
    }
  }
};

// ---------------------------------------------------------------------------
// Negative association

namespace detail {

// joint[a * 2^{k2} + b] = P[S ∩ part1 = a, S ∩ part2 = b] (packed masks).
inline std::vector<double> joint_law(const DistributionTable& t, Subset part1, Subset part2) {
  const std::size_t c2 = std::size_t{1} << popcount(part2);
  std::vector<double> joint((std::size_t{1} << popcount(part1)) * c2, 0.0);
  for (Subset s = 0; s < t.mass().size(); ++s) joint[compress(s, part1) * c2 + compress(s, part2)] += t[s];
  return joint;
}

inline void check_parts(Subset part1, Subset part2, Subset all) {
  if ((part1 & part2) != 0) throw DomainError("split parts must be disjoint");
  if (((part1 | part2) & ~all) != 0) throw StructuralError("split part outside ground");
  if (popcount(part1) > 4 || popcount(part2) > 4) throw CapacityError("split parts are limited to 4 elements");
}

}  // namespace detail

// P(A1) P(A2) - P(A1 ∩ A2).
inline double na_margin(const DistributionTable& t, const IncreasingEvent& a1, const IncreasingEvent& a2) {
  double p1 = 0.0, p2 = 0.0, p12 = 0.0;
  for (Subset s = 0; s < t.mass().size(); ++s) {
    const bool in1 = a1.contains(s), in2 = a2.contains(s);
    if (in1) p1 += t[s];
    if (in2) p2 += t[s];
    if (in1 && in2) p12 += t[s];
  }
  return p1 * p2 - p12;
}

/// Every pair of increasing events on the two parts.
inline CheckReport check_negative_association(const DistributionTable& t, Subset part1, Subset part2) {
  require_enumerable(t.size(), 8, "negative association");
  detail::check_parts(part1, part2, t.ground().all());
  const auto tables1 = enumerate_monotone_tables(static_cast<std::size_t>(popcount(part1)));
  const auto tables2 = enumerate_monotone_tables(static_cast<std::size_t>(popcount(part2)));
  const auto joint = detail::joint_law(t, part1, part2);
  const std::size_t c1 = std::size_t{1} << popcount(part1);
  const std::size_t c2 = std::size_t{1} << popcount(part2);
  std::vector<double> m1(c1, 0.0), m2(c2, 0.0);
  for (std::size_t a = 0; a < c1; ++a)
    for (std::size_t b = 0; b < c2; ++b) {
      m1[a] += joint[a * c2 + b];
      m2[b] += joint[a * c2 + b];
    }
  std::vector<double> p2(tables2.size(), 0.0);
  for (std::size_t j = 0; j < tables2.size(); ++j)
    for (std::size_t b = 0; b < c2; ++b)
      if (tables2[j][b]) p2[j] += m2[b];

  CheckReport r;
  r.suite = "negative-association";
  r.instances = 1;
  std::size_t worst_i = 0, worst_j = 0;
  std::vector<double> row(c2);
  for (std::size_t i = 0; i < tables1.size(); ++i) {
    double p1 = 0.0;
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t a = 0; a < c1; ++a) {
      if (!tables1[i][a]) continue;
      p1 += m1[a];
      for (std::size_t b = 0; b < c2; ++b) row[b] += joint[a * c2 + b];
    }
    for (std::size_t j = 0; j < tables2.size(); ++j) {
      double p12 = 0.0;
      for (std::size_t b = 0; b < c2; ++b)
        if (tables2[j][b]) p12 += row[b];
      const double margin = p1 * p2[j] - p12;
      if (margin < r.worst_margin) {
        r.worst_margin = margin;
        worst_i = i;
        worst_j = j;
      }
    }
  }
  r.pass = r.worst_margin >= -kTheoremSlack;
  if (!r.pass) {
    Counterexample c;
    c.table = t;
    c.events = {IncreasingEvent(part1, tables1[worst_i]), IncreasingEvent(part2, tables2[worst_j])};
    c.margin = r.worst_margin;
    c.note = "increasing events on disjoint supports are positively correlated";
    r.counterexample = std::move(c);
  }
  return r;
}

inline CheckReport check_negative_association(const Kernel& kernel, Subset part1, Subset part2) {
  require_enumerable(kernel.size(), 8, "negative association");
  require_valid(kernel);
  auto r = check_negative_association(enumerate(kernel), part1, part2);
  if (r.counterexample) r.counterexample->kernels = {kernel};
  return r;
}

/// Negative association of P^Q conditioned on `spec`; the split is given on
/// the original ground and restricted to the untouched elements.
inline CheckReport check_conditional_na(const Kernel& kernel, const ConditionSpec& spec, Subset part1, Subset part2) {
  const Kernel conditioned = condition(kernel, spec);
  const Subset rest = kernel.ground().all() & ~spec.touched();
  auto r = check_negative_association(conditioned, compress(part1 & rest, rest), compress(part2 & rest, rest));
  r.suite = "conditional-na";
  return r;
}

// Random split of {0..n-1} into two parts of at most 4 elements.
inline std::pair<Subset, Subset> random_split(Rng& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  const std::size_t first = std::min<std::size_t>(4, std::max<std::size_t>(1, n / 2));
  Subset a = 0, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < first) a |= singleton(idx[i]);
    else if (i < first + 4) b |= singleton(idx[i]);
  }
  return {a, b};
}

// ---------------------------------------------------------------------------
// BK probe

// P[A1 □ A2]: some F1 ⊆ S lies in A1 with S \ F1 in A2 (both events increasing).
inline double disjoint_occurrence(const DistributionTable& t, const IncreasingEvent& a1, const IncreasingEvent& a2) {
  double p = 0.0;
  for (Subset s = 0; s < t.mass().size(); ++s) {
    if (t[s] == 0.0) continue;
    bool hit = false;
    for (Subset f = s;; f = (f - 1) & s) {
      if (a1.contains(f) && a2.contains(s & ~f)) {
        hit = true;
        break;
      }
      if (f == 0) break;
    }
    if (hit) p += t[s];
  }
  return p;
}

inline double bk_margin(const DistributionTable& t, const IncreasingEvent& a1, const IncreasingEvent& a2) {
  return t.probability([&](Subset s) { return a1.contains(s); }) * t.probability([&](Subset s) { return a2.contains(s); }) -
         disjoint_occurrence(t, a1, a2);
}

inline CheckReport bk_search(const Kernel& kernel, std::size_t trials, std::uint64_t seed) {
  require_enumerable(kernel.size(), 6, "bk_search");
  require_valid(kernel);
  const auto t = enumerate(kernel);
  const Subset all = kernel.ground().all();
  CheckReport r;
  r.suite = "bk";
  r.theorem = false;
  r.seed = seed;
  Rng rng(seed, 0xb4);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto a1 = random_increasing_event(rng, all);
    const auto a2 = random_increasing_event(rng, all);
    const double m = bk_margin(t, a1, a2);
    ++r.instances;
    if (m < -kProbeFlag) ++r.flagged;
    if (m < r.worst_margin) {
      r.worst_margin = m;
      if (m < -kProbeFlag) r.counterexample = Counterexample{{kernel}, std::nullopt, {a1, a2}, 0, 0, m, "BK inequality violated"};
    }
  }
  r.pass = r.flagged == 0;
  return r;
}

// ---------------------------------------------------------------------------
// Tail correlation

struct TailBound {
  double bound = 0.0;           // (2^{|K|} |K| Σ_K ||P_[F] P_H e||^2)^{1/2}
  double variance_bound = 0.0;  // |K| Σ_K ||P_[F] P_H e||^2
};

inline TailBound tail_bound(const Subspace& h, Subset k, Subset f) {
  const Matrix p = h.projection();
  double s = 0.0;
  for (auto e : elements(k))
    for (auto g : elements(f)) s += std::norm(p(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(e)));
  const double kk = popcount(k);
  return {std::sqrt(std::ldexp(1.0, popcount(k)) * kk * s), kk * s};
}

/// Exact covariance bound between F(K) and F(F). Every A1 in F(K) is
/// enumerated; for each, the worst A2 in F(F) is the union of the atoms of
/// F with covariance of one sign, so all pairs are covered.
inline CheckReport check_tail_correlation(const Subspace& h, Subset k, Subset f) {
  require_enumerable(h.size(), 10, "tail correlation");
  if (k == 0 || f == 0) throw DomainError("tail correlation: K and F must be nonempty");
  if ((k & f) != 0) throw DomainError("tail correlation: K and F overlap");
  if (((k | f) & ~h.ground().all()) != 0) throw StructuralError("tail correlation: subset outside ground");
  if (popcount(k) > 3) throw CapacityError("tail correlation: |K| is limited to 3");
  const auto t = enumerate(h);
  const auto joint = detail::joint_law(t, k, f);
  const std::size_t ck = std::size_t{1} << popcount(k);
  const std::size_t cf = std::size_t{1} << popcount(f);
  std::vector<double> mk(ck, 0.0), mf(cf, 0.0);
  for (std::size_t a = 0; a < ck; ++a)
    for (std::size_t b = 0; b < cf; ++b) {
      mk[a] += joint[a * cf + b];
      mf[b] += joint[a * cf + b];
    }
  const auto bound = tail_bound(h, k, f);

  CheckReport r;
  r.suite = "tail-correlation";
  r.instances = 1;
  std::vector<double> cov(cf);
  for (std::uint64_t event = 0; event < (std::uint64_t{1} << ck); ++event) {
    std::fill(cov.begin(), cov.end(), 0.0);
    for (std::size_t a = 0; a < ck; ++a) {
      if (!((event >> a) & 1U)) continue;
      for (std::size_t b = 0; b < cf; ++b) cov[b] += joint[a * cf + b] - mk[a] * mf[b];
    }
    double pos = 0.0, neg = 0.0;
    for (double c : cov) (c > 0 ? pos : neg) += c;
    const double margin = bound.bound - std::max(pos, -neg);
    r.worst_margin = std::min(r.worst_margin, margin);
  }
  // Var(P[S ∩ K = C | F(F)]) for each C ⊆ K
  for (std::size_t c = 0; c < ck; ++c) {
    double var = 0.0;
    for (std::size_t b = 0; b < cf; ++b) {
      if (mf[b] <= 0.0) continue;
      const double d = joint[c * cf + b] / mf[b] - mk[c];
      var += mf[b] * d * d;
    }
    r.worst_margin = std::min(r.worst_margin, bound.variance_bound - var);
  }
  r.pass = r.worst_margin >= -kTheoremSlack;
  if (!r.pass) {
    Counterexample c;
    c.kernels = {projection_kernel(h)};
    c.k = k;
    c.f = f;
    c.margin = r.worst_margin;
    c.note = "covariance exceeds tail-correlation bound";
    r.counterexample = std::move(c);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Entropy concavity probe

enum class Ensemble { projection, contraction, toeplitz };

inline Ensemble parse_ensemble(const std::string& s) {
  if (s == "projection") return Ensemble::projection;
  if (s == "contraction") return Ensemble::contraction;
  if (s == "toeplitz") return Ensemble::toeplitz;
  throw DomainError("unknown ensemble '" + s + "' (projection|contraction|toeplitz)");
}

inline Kernel draw_kernel(Rng& rng, std::size_t n, Ensemble ensemble) {
  switch (ensemble) {
    case Ensemble::projection: return random::projection(rng, n);
    case Ensemble::contraction: return random::contraction(rng, n);
    case Ensemble::toeplitz: return toeplitz_from_symbol(n, random::toeplitz_symbol(rng, std::min<std::size_t>(3, n - 1)));
  }
  throw DomainError("unknown ensemble");
}

// ent((Q1 + Q2)/2) - (ent(Q1) + ent(Q2))/2.
inline double concavity_margin(const Kernel& q1, const Kernel& q2) {
  require_same_ground(q1.ground(), q2.ground(), "concavity_margin");
  const Kernel mid(q1.ground(), (q1.entries() + q2.entries()) / 2.0, q1.tolerance());
  return entropy(mid) - (entropy(q1) + entropy(q2)) / 2.0;
}

inline CheckReport entropy_concavity_experiment(std::size_t trials, std::size_t n, Ensemble ensemble, std::uint64_t seed) {
  require_enumerable(n, 10, "entropy concavity");
  if (n == 0) throw DomainError("entropy concavity: n must be positive");
  CheckReport r;
  r.suite = "entropy-concavity";
  r.theorem = false;
  r.seed = seed;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(seed, i);
    const Kernel q1 = draw_kernel(rng, n, ensemble);
    const Kernel q2 = draw_kernel(rng, n, ensemble);
    const double m = concavity_margin(q1, q2);
    ++r.instances;
    if (m < -kProbeFlag) ++r.flagged;
    if (m < r.worst_margin) {
      r.worst_margin = m;
      if (m < -kProbeFlag) r.counterexample = Counterexample{{q1, q2}, std::nullopt, {}, 0, 0, m, "entropy not concave"};
    }
  }
  r.pass = r.flagged == 0;
  return r;
}

// ---------------------------------------------------------------------------
// Concentration

/// P[| |S ∩ A| - μ | >= a] <= 2 exp(-2 a^2 / |A|) for a = 0.5, 1, ..., |A|.
inline CheckReport concentration_check(const Kernel& kernel, Subset a) {
  require_enumerable(kernel.size(), kMaxEnumerate, "concentration_check");
  a &= kernel.ground().all();
  if (a == 0) throw DomainError("concentration_check: A must be nonempty");
  const auto stats = marginal_count_stats(kernel, a);
  const double size = popcount(a);
  CheckReport r;
  r.suite = "concentration";
  r.instances = 1;
  for (double dev = 0.5; dev <= size + 1e-12; dev += 0.5) {
    double tail = 0.0;
    for (std::size_t c = 0; c < stats.pmf.size(); ++c)
      if (std::abs(static_cast<double>(c) - stats.mean) >= dev - 1e-12) tail += stats.pmf[c];
    r.worst_margin = std::min(r.worst_margin, 2.0 * std::exp(-2.0 * dev * dev / size) - tail);
  }
  r.pass = r.worst_margin >= -kTheoremSlack;
  if (!r.pass) r.counterexample = Counterexample{{kernel}, std::nullopt, {}, a, 0, r.worst_margin, "count tail exceeds bound"};
  return r;
}

// ---------------------------------------------------------------------------
// Re-evaluation of a reported instance

inline double reevaluate(const std::string& suite, const Counterexample& c) {
  if (suite == "negative-association" || suite == "conditional-na") {
    const auto t = c.table ? *c.table : enumerate(c.kernels.at(0));
    return na_margin(t, c.events.at(0), c.events.at(1));
  }
  if (suite == "bk") {
    const auto t = c.table ? *c.table : enumerate(c.kernels.at(0));
    return bk_margin(t, c.events.at(0), c.events.at(1));
  }
  if (suite == "entropy-concavity") return concavity_margin(c.kernels.at(0), c.kernels.at(1));
  if (suite == "tail-correlation") {
    const auto& q = c.kernels.at(0);
    return check_tail_correlation(Subspace::span(q.ground(), q.entries()), c.k, c.f).worst_margin;
  }
  if (suite == "concentration") return concentration_check(c.kernels.at(0), c.k).worst_margin;
  throw DomainError("unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------------------
// Randomised batteries used by the CLI and the acceptance suite

struct SuiteConfig {
  std::size_t n = 6;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string ensemble = "contraction";
};

// Cycles through contractions, projections, conditioned and reweighted
// instances; ground sizes 2..n.
inline CheckReport negative_association_suite(const SuiteConfig& cfg) {
  require_enumerable(cfg.n, 8, "negative association suite");
  if (cfg.n < 2) throw DomainError("negative association suite: n must be at least 2");
  CheckReport total;
  total.suite = "negative-association";
  total.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, i);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(cfg.n - 1));
    CheckReport r;
    switch (i % 4) {
      case 0: {
        const auto q = random::contraction(rng, n);
        const auto [a, b] = random_split(rng, n);
        r = check_negative_association(q, a, b);
        break;
      }
      case 1: {
        const auto q = random::projection(rng, n);
        const auto [a, b] = random_split(rng, n);
        r = check_negative_association(q, a, b);
        break;
      }
      case 2: {
        // condition a contraction on one element in and (if room) one out
        const std::size_t m = std::max<std::size_t>(n, 3);
        const auto q = random::uniform_spectrum_contraction(rng, m);
        ConditionSpec spec{singleton(0), m > 3 ? singleton(1) : Subset{0}};
        if (cylinder_prob(q, spec.include, spec.exclude) <= q.tolerance()) spec = {};
        const Subset rest = q.ground().all() & ~spec.touched();
        const auto [a, b] = random_split(rng, static_cast<std::size_t>(popcount(rest)));
        r = check_conditional_na(q, spec, expand(a, rest), expand(b, rest));
        break;
      }
      default: {
        const auto h = random::any_subspace(rng, n);
        std::vector<double> w(n);
        for (auto& x : w) x = rng.uniform(0.2, 5.0);
        const auto q = projection_kernel(reweight(h, w));
        const auto [a, b] = random_split(rng, n);
        r = check_negative_association(q, a, b);
        break;
      }
    }
    total.merge(r);
  }
  return total;
}

inline CheckReport conditional_na_suite(const SuiteConfig& cfg) {
  require_enumerable(cfg.n, 8, "conditional NA suite");
  if (cfg.n < 3) throw DomainError("conditional NA suite: n must be at least 3");
  CheckReport total;
  total.suite = "conditional-na";
  total.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, i);
    const auto q = random::uniform_spectrum_contraction(rng, cfg.n);
    const auto order = [&] {
      std::vector<std::size_t> idx(cfg.n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t j = cfg.n; j > 1; --j) std::swap(idx[j - 1], idx[rng.below(j)]);
      return idx;
    }();
    ConditionSpec spec{singleton(order[0]), rng.below(2) ? singleton(order[1]) : Subset{0}};
    if (cylinder_prob(q, spec.include, spec.exclude) <= q.tolerance()) continue;
    const Subset rest = q.ground().all() & ~spec.touched();
    const auto [a, b] = random_split(rng, static_cast<std::size_t>(popcount(rest)));
    total.merge(check_conditional_na(q, spec, expand(a, rest), expand(b, rest)));
  }
  return total;
}

inline CheckReport bk_suite(const SuiteConfig& cfg) {
  CheckReport total;
  total.suite = "bk";
  total.theorem = false;
  total.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, i);
    const auto q = (i % 2 == 0) ? random::contraction(rng, cfg.n) : random::projection(rng, cfg.n);
    total.merge(bk_search(q, 50, cfg.seed + i));
  }
  return total;
}

// Random projections on 2..n elements with random disjoint K (|K| <= 3) and F.
inline CheckReport tail_correlation_suite(const SuiteConfig& cfg) {
  require_enumerable(cfg.n, 10, "tail correlation suite");
  if (cfg.n < 2) throw DomainError("tail correlation suite: n must be at least 2");
  CheckReport total;
  total.suite = "tail-correlation";
  total.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, i);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(cfg.n - 1));
    const auto h = random::any_subspace(rng, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = n; j > 1; --j) std::swap(idx[j - 1], idx[rng.below(j)]);
    const std::size_t ksize = 1 + static_cast<std::size_t>(rng.below(std::min<std::size_t>(3, n - 1)));
    const std::size_t fsize = 1 + static_cast<std::size_t>(rng.below(n - ksize));
    Subset k = 0, f = 0;
    for (std::size_t j = 0; j < ksize; ++j) k |= singleton(idx[j]);
    for (std::size_t j = ksize; j < ksize + fsize; ++j) f |= singleton(idx[j]);
    total.merge(check_tail_correlation(h, k, f));
  }
  return total;
}

inline CheckReport entropy_concavity_suite(const SuiteConfig& cfg) {
  return entropy_concavity_experiment(cfg.trials, cfg.n, parse_ensemble(cfg.ensemble), cfg.seed);
}

inline CheckReport concentration_suite(const SuiteConfig& cfg) {
  require_enumerable(cfg.n, kMaxEnumerate, "concentration suite");
  CheckReport total;
  total.suite = "concentration";
  total.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng(cfg.seed, i);
    const auto q = (i % 2 == 0) ? random::contraction(rng, cfg.n) : random::projection(rng, cfg.n);
    Subset a = rng.below(std::uint64_t{1} << cfg.n);
    if (a == 0) a = q.ground().all();
    total.merge(concentration_check(q, a));
  }
  return total;
}

inline CheckReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "negative-association") return negative_association_suite(cfg);
  if (name == "conditional-na") return conditional_na_suite(cfg);
  if (name == "bk") return bk_suite(cfg);
  if (name == "tail-correlation") return tail_correlation_suite(cfg);
  if (name == "entropy-concavity") return entropy_concavity_suite(cfg);
  if (name == "concentration") return concentration_suite(cfg);
  throw DomainError("unknown suite '" + name + "'");
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"negative-association", "conditional-na", "bk",
                                                 "tail-correlation", "entropy-concavity", "concentration"};
  return names;
}

}  // namespace dpm
