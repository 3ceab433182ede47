#pragma once

// Exact sampling from P^Q by sequential conditioning: visit elements one at
// a time, include with the current diagonal entry, then update the remaining
// block by the inclusion Schur complement or its dual.

#include <boost/math/special_functions/gamma.hpp>
#include <cassert>
#include <chrono>
#include <numeric>

#include "dpm/kernel.hpp"
#include "dpm/measure.hpp"
#include "dpm/random.hpp"

namespace dpm {

inline constexpr double kPivotFloor = 1e-12;

struct SampleOptions {
  // Visit order as a permutation of ground indices; empty means ground order.
  std::vector<std::size_t> order;
  // Draw a visit order from the seed (ignored when `order` is set).
  bool random_order = false;
};

struct SampleRun {
  GroundSet ground;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<Subset> outcomes;
  std::chrono::nanoseconds elapsed{0};
};

class Sampler {
 public:
  explicit Sampler(const Kernel& kernel, std::vector<std::size_t> order = {}) : n_(kernel.size()) {
    require_valid(kernel);
    if (order.empty()) {
      order.resize(n_);
      std::iota(order.begin(), order.end(), std::size_t{0});
    }
    if (order.size() != n_) throw StructuralError("sampler: visit order must be a permutation of the ground set");
    std::vector<bool> seen(n_, false);
    for (auto i : order) {
      if (i >= n_ || seen[i]) throw StructuralError("sampler: visit order must be a permutation of the ground set");
      seen[i] = true;
    }
    order_ = std::move(order);
    start_.resize(n_ * n_);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < n_; ++i) start_[j * n_ + i] = kernel(order_[i], order_[j]);
    work_.resize(n_ * n_);
  }

  std::size_t size() const { return n_; }

  Subset draw(Rng& rng) {
    std::copy(start_.begin(), start_.end(), work_.begin());
    Subset out = 0;
    auto w = [this](std::size_t i, std::size_t j) -> Complex& { return work_[j * n_ + i]; };
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex pivot = w(k, k);
      const double u = rng.uniform();
      bool include;
      bool update = true;
      if (std::abs(pivot) <= kPivotFloor) {
        include = false;
        update = false;
      } else if (std::abs(1.0 - pivot) <= kPivotFloor) {
        include = true;
        update = false;
      } else {
        include = u < std::clamp(pivot.real(), 0.0, 1.0);
      }
      if (include) out |= singleton(order_[k]);
      if (!update) continue;
      // Inclusion: Q' = Q_rest - Q_{rest,k} Q_{k,rest} / Q_kk.
      // Exclusion: Q' = Q_rest + Q_{rest,k} Q_{k,rest} / (1 - Q_kk).
      const Complex scale = include ? -1.0 / pivot : 1.0 / (1.0 - pivot);
      for (std::size_t j = k + 1; j < n_; ++j) {
        const Complex kj = w(k, j) * scale;
        if (kj == Complex{}) continue;
        for (std::size_t i = k + 1; i < n_; ++i) w(i, j) += w(i, k) * kj;
      }
#ifndef NDEBUG
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double d = w(i, i).real();
        assert(d >= -1e-8 && d <= 1.0 + 1e-8);
      }
#endif
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<Complex> start_;  // column-major, permuted to visit order
  std::vector<Complex> work_;
};

inline Subset sample_one(const Kernel& kernel, Rng& rng) {
  Sampler s(kernel);
  return s.draw(rng);
}

// Permutation of {0..n-1} determined by the seed alone.
inline std::vector<std::size_t> seeded_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, ~std::uint64_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

/// Draw i uses the substream (seed, i), so outcomes do not depend on how
/// draws are scheduled.
inline SampleRun sample_many(const Kernel& kernel, std::size_t count, std::uint64_t seed, SampleOptions options = {}) {
  if (count == 0) throw DomainError("sample_many: count must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  auto order = options.order;
  if (order.empty() && options.random_order) order = seeded_order(kernel.size(), seed);
  Sampler sampler(kernel, std::move(order));
  SampleRun run;
  run.ground = kernel.ground();
  run.seed = seed;
  run.count = count;
  run.outcomes.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed, i);
    run.outcomes[i] = sampler.draw(rng);
  }
  run.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0);
  return run;
}

inline DistributionTable empirical_table(const SampleRun& run) {
  require_enumerable(run.ground.size(), kMaxEnumerate, "empirical_table");
  if (run.outcomes.empty()) throw DomainError("empirical_table: run has no outcomes");
  std::vector<double> counts(std::size_t{1} << run.ground.size(), 0.0);
  for (auto s : run.outcomes) counts.at(s) += 1.0;
  const double total = static_cast<double>(run.outcomes.size());
  for (auto& c : counts) c /= total;
  return DistributionTable(run.ground, std::move(counts), run.outcomes.size());
}

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit. Cells with expected count below 5 are pooled
/// into one "other" cell, which counts only once its expectation reaches 5.
inline ChiSquare chisquare_gof(const DistributionTable& empirical, const DistributionTable& exact) {
  require_same_ground(empirical.ground(), exact.ground(), "chisquare_gof");
  if (empirical.samples() == 0) throw DomainError("chisquare_gof: empirical table carries no sample count");
  const double n = static_cast<double>(empirical.samples());
  double stat = 0.0;
  std::size_t cells = 0;
  double other_expected = 0.0;
  double other_observed = 0.0;
  for (std::size_t s = 0; s < exact.mass().size(); ++s) {
    const double expected = exact.mass()[s] * n;
    const double observed = empirical.mass()[s] * n;
    if (expected >= 5.0) {
      stat += (observed - expected) * (observed - expected) / expected;
      ++cells;
    } else {
      other_expected += expected;
      other_observed += observed;
    }
  }
  if (other_expected >= 5.0) {
    stat += (other_observed - other_expected) * (other_observed - other_expected) / other_expected;
    ++cells;
  } else if (other_observed > 0.5 && other_expected < 1e-6) {
    // outcomes the exact law rules out
    return {std::numeric_limits<double>::infinity(), cells, 0.0};
  }
  ChiSquare out;
  out.statistic = stat;
  out.dof = cells > 0 ? cells - 1 : 0;
  out.p_value = out.dof == 0 ? 1.0 : boost::math::gamma_q(static_cast<double>(out.dof) / 2.0, stat / 2.0);
  return out;
}

}  // namespace dpm
