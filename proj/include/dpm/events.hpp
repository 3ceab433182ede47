#pragma once

// Increasing (upward-closed) events over a support set.

#include <vector>

#include "dpm/core.hpp"
#include "dpm/random.hpp"

namespace dpm {

class IncreasingEvent {
 public:
  // `indicator[m]` says whether the subset of `support` packed as m belongs
  // to the event.
  IncreasingEvent(Subset support, std::vector<bool> indicator) : support_(support), indicator_(std::move(indicator)) {
    const auto k = static_cast<std::size_t>(popcount(support_));
    if (indicator_.size() != (std::size_t{1} << k)) throw StructuralError("increasing event: indicator needs 2^|support| entries");
    for (Subset a = 0; a < indicator_.size(); ++a) {
      if (!indicator_[a]) continue;
      for (std::size_t i = 0; i < k; ++i)
        if (!indicator_[a | singleton(i)]) throw DomainError("event is not increasing");
    }
  }

  // Up-closure of the given generating subsets (ground masks inside support).
  static IncreasingEvent generated_by(Subset support, const std::vector<Subset>& generators) {
    const auto k = static_cast<std::size_t>(popcount(support));
    std::vector<bool> ind(std::size_t{1} << k, false);
    for (auto g : generators) {
      if (!is_subset(g, support)) throw DomainError("event generator outside support");
      const Subset packed = compress(g, support);
      for (Subset a = 0; a < ind.size(); ++a)
        if (is_subset(packed, a)) ind[a] = true;
    }
    return IncreasingEvent(support, std::move(ind));
  }

  Subset support() const { return support_; }
  const std::vector<bool>& indicator() const { return indicator_; }
  bool contains(Subset s) const { return indicator_[compress(s, support_)]; }
  bool empty() const {
    for (bool b : indicator_)
      if (b) return false;
    return true;
  }

 private:
  Subset support_;
  std::vector<bool> indicator_;
};

/// Every monotone Boolean function on the subsets of a k-element support
/// (k <= 4), each represented as its indicator table over packed masks.
inline std::vector<std::vector<bool>> enumerate_monotone_tables(std::size_t k) {
  if (k > 4) throw CapacityError("increasing events: support size exceeds 4");
  const std::size_t cells = std::size_t{1} << k;
  std::vector<std::vector<bool>> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cells); ++bits) {
    bool monotone = true;
    for (std::size_t a = 0; a < cells && monotone; ++a) {
      if (!((bits >> a) & 1U)) continue;
      for (std::size_t i = 0; i < k; ++i)
        if (!((bits >> (a | (std::size_t{1} << i))) & 1U)) {
          monotone = false;
          break;
        }
    }
    if (!monotone) continue;
    std::vector<bool> table(cells);
    for (std::size_t a = 0; a < cells; ++a) table[a] = (bits >> a) & 1U;
    out.push_back(std::move(table));
  }
  return out;
}

inline std::vector<IncreasingEvent> enumerate_increasing_events(Subset support) {
  std::vector<IncreasingEvent> out;
  for (auto& t : enumerate_monotone_tables(static_cast<std::size_t>(popcount(support)))) out.emplace_back(support, std::move(t));
  return out;
}

// Up-closure of 1 to 3 random generators drawn inside `support`.
inline IncreasingEvent random_increasing_event(Rng& rng, Subset support) {
  const auto k = static_cast<std::size_t>(popcount(support));
  const auto count = 1 + rng.below(3);
  std::vector<Subset> gens;
  for (std::uint64_t i = 0; i < count; ++i) gens.push_back(expand(rng.below(std::uint64_t{1} << k), support));
  return IncreasingEvent::generated_by(support, gens);
}

}  // namespace dpm
