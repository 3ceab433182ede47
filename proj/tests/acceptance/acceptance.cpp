// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "dpm/dpm.hpp"

using namespace dpm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Named {
  std::string name;
  Kernel kernel;
  std::optional<Subspace> subspace;  // set for projection kernels
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

// Fixed zoo plus seeded random contractions and projections, |E| <= 6.
std::vector<Named> battery() {
  std::vector<Named> out;
  out.push_back({"bernoulli", bernoulli(4, 0.3), std::nullopt});
  out.push_back({"diagonal", diagonal_kernel({0.1, 0.5, 0.9, 0.7, 0.2}), std::nullopt});
  out.push_back({"renewal", renewal_truncated(6, 0.4), std::nullopt});
  {
    Rng rng(100, 0);
    out.push_back({"toeplitz", toeplitz_from_symbol(6, random::toeplitz_symbol(rng, 2)), std::nullopt});
  }
  out.push_back({"zn", zn_character(5, 0b00101), std::nullopt});
  for (std::size_t v : {3, 4}) {
    const auto h = star_space(Graph::complete(v));
    out.push_back({"K" + std::to_string(v), projection_kernel(h), h});
  }
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng(101, i);
    const std::size_t n = 2 + i % 5;
    out.push_back({"contraction", random::contraction(rng, n, i % 2 == 0), std::nullopt});
  }
  for (std::uint64_t i = 0; i < 5; ++i) {
    Rng rng(102, i);
    out.push_back({"uniform-spectrum", random::uniform_spectrum_contraction(rng, 3 + i % 4), std::nullopt});
  }
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng(103, i);
    const std::size_t n = 2 + i % 5;
    const auto h = random::subspace(rng, n, 1 + i % (n - 1), i % 3 == 0);
    out.push_back({"projection", projection_kernel(h), h});
  }
  return out;
}

// All single- and two-element specs whose event has positive probability.
std::vector<ConditionSpec> small_specs(const Kernel& q) {
  std::vector<ConditionSpec> specs;
  const std::size_t n = q.size();
  for (std::size_t e = 0; e < n; ++e) {
    specs.push_back({singleton(e), 0});
    specs.push_back({0, singleton(e)});
    for (std::size_t f = e + 1; f < n; ++f) {
      specs.push_back({singleton(e) | singleton(f), 0});
      specs.push_back({0, singleton(e) | singleton(f)});
      specs.push_back({singleton(e), singleton(f)});
      specs.push_back({singleton(f), singleton(e)});
    }
  }
  std::vector<ConditionSpec> valid;
  for (const auto& s : specs)
    if (cylinder_prob(q, s.include, s.exclude) > q.tolerance()) valid.push_back(s);
  return valid;
}

Outcome triple_oracle() {
  double worst = 0.0;
  std::size_t points = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(1, i);
    const std::size_t n = 1 + i % 6;
    const auto h = random::any_subspace(rng, n, i % 4 == 0);
    const auto q = projection_kernel(h);
    const auto t = enumerate(q);
    const Subset all = q.ground().all();
    for (Subset a = 0; a <= all; ++a) {
      const Subset rest = all & ~a;
      for (Subset b = rest;; b = (b - 1) & rest) {
        const double det = cylinder_prob(q, a, b);
        const double ext = oracle_cylinder(h, a, b);
        const double sum = t.cylinder(a, b);
        worst = std::max({worst, std::abs(det - ext), std::abs(det - sum), std::abs(ext - sum)});
        ++points;
        if (b == 0) break;
      }
    }
  }
  return {worst <= 1e-9, "200 projections, " + std::to_string(points) + " cylinders, max gap " + sci(worst)};
}

Outcome spanning_trees() {
  bool ok = true;
  double worst = 0.0;
  std::string counts;
  for (std::size_t v : {3, 4}) {
    const Graph g = Graph::complete(v);
    const auto y = transfer_current(g);
    const auto law = oracle::tree_law(g);
    const auto trees = oracle::spanning_trees(g);
    const double expected = v == 3 ? 3.0 : 16.0;
    ok = ok && trees.size() == static_cast<std::size_t>(expected) && std::abs(tree_count(g) - expected) < 1e-9;
    counts += (counts.empty() ? "" : ", ") + std::to_string(trees.size()) + " trees";
    const auto t = enumerate(y);
    for (Subset s = 0; s < t.mass().size(); ++s) {
      const double want = trees.count(s) ? 1.0 / expected : 0.0;
      worst = std::max(worst, std::abs(t[s] - want));
    }
    // transfer current theorem: det(Y restricted to A) = P[A ⊆ T]
    for (Subset a = 0; a < t.mass().size(); ++a) {
      const Complex det = a == 0 ? Complex(1.0) : linalg::principal(y.entries(), elements(a)).determinant();
      double p = 0.0;
      for (Subset s = 0; s < law.size(); ++s)
        if (is_subset(a, s)) p += law[s];
      worst = std::max({worst, std::abs(det.real() - p), std::abs(det.imag())});
    }
  }
  return {ok && worst <= 1e-9, counts + ", max gap " + sci(worst)};
}

Outcome foster() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(3, i);
    const std::size_t v = 2 + rng.below(7);
    const auto g = random_connected_graph(rng, v, rng.below(v + 2), i % 2 == 0);
    const auto y = transfer_current(g);
    worst = std::max(worst, std::abs(y.entries().trace().real() - static_cast<double>(v - 1)));
  }
  return {worst <= 1e-9, "50 graphs up to 8 vertices, max |tr Y - (|V|-1)| " + sci(worst)};
}

Outcome sampler_exactness() {
  constexpr std::size_t kDraws = 1'000'000;
  double worst_tv = 0.0, worst_p = 1.0;
  auto check = [&](const Kernel& q, std::uint64_t seed) {
    const auto run = sample_many(q, kDraws, seed);
    const auto emp = empirical_table(run);
    const auto exact = enumerate(q);
    worst_tv = std::max(worst_tv, tv_distance(emp, exact));
    worst_p = std::min(worst_p, chisquare_gof(emp, exact).p_value);
  };
  check(transfer_current(Graph::complete(4)), 4);
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(40, i);
    check(random::contraction(rng, 1 + i % 5), 400 + i);
  }
  return {worst_tv <= 0.005 && worst_p >= 1e-4,
          "K4 + 20 contractions at 1e6 draws, max TV " + fmt("%.4f", worst_tv) + ", min p " + sci(worst_p)};
}

Outcome duality(const std::vector<Named>& kernels) {
  double worst = 0.0;
  for (const auto& k : kernels)
    worst = std::max(worst, tv_distance(enumerate(dual(k.kernel)), enumerate(k.kernel).complement_pushforward()));
  return {worst <= 1e-9, std::to_string(kernels.size()) + " battery kernels, max TV " + sci(worst)};
}

Outcome conditioning(const std::vector<Named>& kernels) {
  double tv = 0.0, routes = 0.0, commute = 0.0;
  std::size_t specs = 0, commuted = 0;
  for (const auto& k : kernels) {
    const auto& q = k.kernel;
    const auto table = enumerate(q);
    for (const auto& spec : small_specs(q)) {
      ++specs;
      tv = std::max(tv, tv_distance(enumerate(condition(q, spec)), table.conditional(spec)));
      const Subset rest = q.ground().all() & ~spec.touched();
      if (k.subspace) {
        const auto sub = subspace_condition(*k.subspace, spec);
        routes = std::max(routes, linalg::max_abs(projection_kernel(sub).restrict(rest).entries() - condition(q, spec).entries()));
      }
      // two-element specs: condition on one element, then the other
      if (popcount(spec.touched()) != 2) continue;
      const auto first = static_cast<std::size_t>(std::countr_zero(spec.touched()));
      const ConditionSpec s1{spec.include & singleton(first), spec.exclude & singleton(first)};
      const ConditionSpec s2{spec.include & ~singleton(first), spec.exclude & ~singleton(first)};
      if (cylinder_prob(q, s1.include, s1.exclude) <= q.tolerance()) continue;
      const Subset rest1 = q.ground().all() & ~s1.touched();
      const auto step = condition(condition(q, s1), {compress(s2.include, rest1), compress(s2.exclude, rest1)});
      commute = std::max(commute, linalg::max_abs(step.entries() - condition(q, spec).entries()));
      if (k.subspace) {
        const auto two = subspace_condition(subspace_condition(*k.subspace, s1), s2);
        commute = std::max(commute, linalg::max_abs(two.projection() - subspace_condition(*k.subspace, spec).projection()));
      }
      ++commuted;
    }
  }
  return {tv <= 1e-8 && routes <= 1e-8 && commute <= 1e-8,
          std::to_string(specs) + " specs, TV " + sci(tv) + ", subspace vs Schur " + sci(routes) + ", order (" +
              std::to_string(commuted) + ") " + sci(commute)};
}

Outcome dilation() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(7, i);
    const std::size_t n = 1 + i % 5;
    const auto q = random::contraction(rng, n, i % 2 == 0);
    worst = std::max(worst, tv_distance(enumerate(dilate(q)).marginal(full_subset(n)), enumerate(q)));
  }
  return {worst <= 1e-8, "50 contractions, max TV " + sci(worst)};
}

Outcome negative_association() {
  SuiteConfig cfg;
  cfg.n = 8;
  cfg.trials = 100;
  cfg.seed = 8;
  const auto r = negative_association_suite(cfg);
  return {r.pass && r.worst_margin >= -1e-9,
          std::to_string(r.instances) + " kernels (contraction, projection, conditioned, reweighted), worst margin " +
              sci(r.worst_margin)};
}

Outcome domination() {
  bool feasible = true, agree = true;
  std::size_t infeasible_seen = 0, compared = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(9, i);
    const std::size_t n = 2 + i % 5;
    const std::size_t r2 = 1 + rng.below(n);
    const std::size_t r1 = rng.below(r2 + 1);
    const Matrix u = random::unitary(rng, n, i % 2 == 0);
    const auto g = GroundSet::numbered(n);
    const Subspace h1(g, u.leftCols(static_cast<Eigen::Index>(r1))), h2(g, u.leftCols(static_cast<Eigen::Index>(r2)));
    const auto p1 = enumerate(h1), p2 = enumerate(h2);
    const auto r = check_domination(p1, p2);
    feasible = feasible && r.feasible;
    if (n <= 4) {
      agree = agree && r.feasible == dominates_by_events(p1, p2);
      ++compared;
    }
  }
  // unrelated pairs on |E| <= 4 exercise the infeasible side of the comparison
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(10, i);
    const std::size_t n = 2 + i % 3;
    const auto p1 = enumerate(i % 2 ? random::contraction(rng, n) : random::projection(rng, n));
    const auto p2 = enumerate(i % 3 ? random::contraction(rng, n) : random::projection(rng, n));
    const bool flow = check_domination(p1, p2).feasible;
    agree = agree && flow == dominates_by_events(p1, p2);
    if (!flow) ++infeasible_seen;
    ++compared;
  }
  return {feasible && agree, "100 nested pairs certified: " + std::string(feasible ? "yes" : "no") + ", " +
                                 std::to_string(compared) + " verdicts vs brute force agree: " + (agree ? "yes" : "no") +
                                 " (" + std::to_string(infeasible_seen) + " infeasible)"};
}

Outcome coupling_conjecture() {
  std::size_t feasible = 0, total = 0;
  double worst = 0.0;
  for (std::size_t n = 4; n <= 7; ++n) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng(n, i);
      const Matrix u = random::unitary(rng, n, i % 2 == 0);
      const auto g = GroundSet::numbered(n);
      const auto r1 = static_cast<Eigen::Index>(1 + rng.below(n - 1));
      const auto r2 = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(static_cast<Eigen::Index>(n) - r1)));
      const auto r = find_disjoint_union_coupling(Subspace(g, u.leftCols(r1)), Subspace(g, u.middleCols(r1, r2)));
      ++total;
      if (r.feasible) ++feasible;
      worst = std::max(worst, r.max_violation);
    }
  }
  std::string zn;
  bool zn_ok = true;
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto r = complete_coupling_zn(n);
    zn_ok = zn_ok && r.feasible;
    zn += (r.feasible ? "" : " !") + std::to_string(n);
  }
  return {feasible == total && zn_ok, std::to_string(feasible) + "/" + std::to_string(total) +
                                          " union LPs feasible (max violation " + sci(worst) + "), Z_n complete couplings n=" +
                                          zn + (zn_ok ? " feasible" : " (! infeasible)")};
}

Outcome tail_correlation() {
  SuiteConfig cfg;
  cfg.n = 8;
  cfg.trials = 50;
  cfg.seed = 11;
  const auto r = tail_correlation_suite(cfg);
  return {r.pass && r.worst_margin >= -1e-9,
          std::to_string(r.instances) + " projections, worst slack " + sci(r.worst_margin)};
}

Outcome entropy_probe() {
  const auto a = entropy_concavity_experiment(1000, 6, Ensemble::contraction, 12);
  const auto b = entropy_concavity_experiment(200, 8, Ensemble::toeplitz, 13);
  const double worst = std::min(a.worst_margin, b.worst_margin);
  // a negative margin is a research flag, reported but not a failure
  return {a.instances == 1000 && b.instances == 200,
          "1000 contraction pairs n=6 + 200 Toeplitz pairs n=8, min margin " + sci(worst) + ", flagged " +
              std::to_string(a.flagged + b.flagged) + (worst >= -1e-8 ? " (no violations)" : " (research flag)")};
}

Outcome renewal() {
  constexpr std::size_t kSites = 30, kDraws = 100'000;
  const double a = 0.4;
  const auto q = renewal_truncated(kSites, a);
  const auto run = sample_many(q, kDraws, 13);
  std::vector<double> hits(kSites, 0.0);
  double gap_sum = 0.0, gaps = 0.0;
  for (auto s : run.outcomes) {
    for (auto e : elements(s)) hits[e] += 1.0;
    // gap from each point in [5, 15] to the next point
    for (std::size_t x = 5; x <= 15; ++x) {
      if (!contains(s, x)) continue;
      const Subset after = s & ~full_subset(x + 1);
      if (after == 0) continue;
      gap_sum += static_cast<double>(static_cast<std::size_t>(std::countr_zero(after)) - x);
      gaps += 1.0;
    }
  }
  const double density = (1.0 - a) / (1.0 + a);
  double marginal_gap = 0.0;
  for (double h : hits) marginal_gap = std::max(marginal_gap, std::abs(h / kDraws - density));
  const double mean_gap = gap_sum / gaps, want = (1.0 + a) / (1.0 - a);
  const double rel = std::abs(mean_gap - want) / want;
  return {marginal_gap <= 0.01 && rel <= 0.02, "max marginal deviation " + fmt("%.4f", marginal_gap) + ", mean gap " +
                                                   fmt("%.4f", mean_gap) + " vs 7/3 (" + fmt("%.2f%%", 100 * rel) + ")"};
}

Outcome kirchhoff() {
  double worst = 0.0, worst_cond = 0.0;
  bool threw = false;
  std::vector<Subspace> spaces = {star_space(Graph::complete(3)), star_space(Graph::complete(4))};
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(14, i);
    const std::size_t n = 2 + i % 9;
    spaces.push_back(random::subspace(rng, n, 1 + rng.below(n - 1), i % 2 == 0));
  }
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    const auto& h = spaces[k];
    Rng rng(15, k);
    std::vector<Vector> vs;
    for (std::size_t e = 0; e < h.size(); ++e) vs.push_back(Vector::Unit(static_cast<Eigen::Index>(h.size()), static_cast<Eigen::Index>(e)));
    Vector v(static_cast<Eigen::Index>(h.size()));
    for (auto& x : v) x = rng.complex_normal();
    vs.push_back(v);
    for (const auto& x : vs) {
      try {
        worst = std::max(worst, linalg::max_abs(expected_kirchhoff(h, x) - h.project(x)));
      } catch (const ConsistencyError&) {
        threw = true;
      }
    }
  }
  // conditioned form on K3/K4 with F a single edge and S = ∅ or F
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& h = spaces[k];
    const auto table = enumerate(h);
    const GroundSet& g = h.ground();
    for (std::size_t f = 0; f < h.size(); ++f) {
      const Subset fs = singleton(f);
      for (Subset s : {Subset{0}, fs}) {
        const Subspace hfs = (h + Subspace::coordinate(g, fs & ~s)).intersect(Subspace::coordinate(g, g.all() & ~fs));
        for (std::size_t e = 0; e < h.size(); ++e) {
          if (e == f) continue;
          const Vector unit = Vector::Unit(static_cast<Eigen::Index>(h.size()), static_cast<Eigen::Index>(e));
          Vector avg = detail::average_kirchhoff(h, unit, table, fs, s);
          avg[static_cast<Eigen::Index>(f)] = 0.0;
          worst_cond = std::max(worst_cond, linalg::max_abs(hfs.project(unit) - avg));
        }
      }
    }
  }
  return {!threw && worst <= 1e-8 && worst_cond <= 1e-7,
          "expectation on K3, K4 + 20 projections: " + sci(worst) + (threw ? " (consistency error)" : "") +
              ", conditioned on single edges: " + sci(worst_cond)};
}

}  // namespace

int main() {
  const auto kernels = battery();
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0: no runtime bar
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"triple-oracle agreement", 60, triple_oracle},
      {"uniform spanning trees", 0, spanning_trees},
      {"Foster trace identity", 0, foster},
      {"sampler exactness", 300, sampler_exactness},
      {"duality", 0, [&] { return duality(kernels); }},
      {"conditioning consistency", 0, [&] { return conditioning(kernels); }},
      {"dilation marginal", 0, dilation},
      {"negative association", 600, negative_association},
      {"stochastic domination", 0, domination},
      {"coupling conjecture", 900, coupling_conjecture},
      {"tail-correlation bound", 0, tail_correlation},
      {"entropy concavity probe", 0, entropy_probe},
      {"renewal example", 0, renewal},
      {"Kirchhoff identities", 0, kirchhoff},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
