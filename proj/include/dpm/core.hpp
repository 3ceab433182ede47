#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace dpm {

using Complex = std::complex<double>;

// Subsets of a ground set are bit masks; bit i is the i-th label.
using Subset = std::uint64_t;

inline constexpr std::size_t kMaxGround = 62;
inline constexpr std::size_t kMaxEnumerate = 20;
inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kRankThreshold = 1e-8;

// Error taxonomy. Everything derives from dpm::Error so a caller can treat
// engineering failures uniformly (the CLI maps them to exit code 1).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StructuralError : Error {  // shapes, ground mismatches
  using Error::Error;
};
struct DomainError : Error {  // parameter out of range
  using Error::Error;
};
struct CapacityError : Error {  // ground too large for the operation
  using Error::Error;
};
struct ValidationError : Error {  // kernel/subspace invariants violated
  using Error::Error;
};
struct ImpossibleEventError : Error {  // conditioning on a null event
  using Error::Error;
};
struct ConsistencyError : Error {  // two routes disagree / numerical breakdown
  using Error::Error;
};

inline int popcount(Subset s) { return std::popcount(s); }
inline bool contains(Subset s, std::size_t i) { return (s >> i) & 1U; }
inline Subset singleton(std::size_t i) { return Subset{1} << i; }
inline Subset full_subset(std::size_t n) { return n == 64 ? ~Subset{0} : (Subset{1} << n) - 1; }
inline bool is_subset(Subset a, Subset b) { return (a & ~b) == 0; }

inline std::vector<std::size_t> elements(Subset s) {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(popcount(s)));
  while (s != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

// Packs the bits of `s` selected by `support` into the low bits, in order.
inline Subset compress(Subset s, Subset support) {
  Subset out = 0;
  int k = 0;
  while (support != 0) {
    const int i = std::countr_zero(support);
    if ((s >> i) & 1U) out |= Subset{1} << k;
    ++k;
    support &= support - 1;
  }
  return out;
}

// Inverse of compress.
inline Subset expand(Subset packed, Subset support) {
  Subset out = 0;
  int k = 0;
  while (support != 0) {
    const int i = std::countr_zero(support);
    if ((packed >> k) & 1U) out |= Subset{1} << i;
    ++k;
    support &= support - 1;
  }
  return out;
}

class GroundSet {
 public:
  GroundSet() = default;

  explicit GroundSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() > kMaxGround) {
      throw CapacityError("ground set has " + std::to_string(labels_.size()) +
                          " elements; at most " + std::to_string(kMaxGround) + " supported");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second) throw StructuralError("duplicate ground label '" + l + "'");
    }
  }

  // Labels e1..en.
  static GroundSet numbered(std::size_t n, const std::string& prefix = "e") {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) labels.push_back(prefix + std::to_string(i));
    return GroundSet(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  Subset all() const { return full_subset(size()); }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    throw StructuralError("unknown ground label '" + label + "'");
  }

  Subset subset_of(const std::vector<std::string>& names) const {
    Subset s = 0;
    for (const auto& n : names) s |= singleton(index_of(n));
    return s;
  }

  // Ground set of the elements in `keep`, in their original order.
  GroundSet restrict(Subset keep) const {
    std::vector<std::string> out;
    for (auto i : elements(keep & all())) out.push_back(labels_[i]);
    return GroundSet(std::move(out));
  }

  std::string format(Subset s, const std::string& sep = ",") const {
    std::string out;
    for (auto i : elements(s)) {
      if (!out.empty()) out += sep;
      out += labels_[i];
    }
    return out;
  }

  friend bool operator==(const GroundSet&, const GroundSet&) = default;

 private:
  std::vector<std::string> labels_;
};

inline void require_same_ground(const GroundSet& a, const GroundSet& b, const char* what) {
  if (!(a == b)) throw StructuralError(std::string(what) + ": ground sets differ");
}

inline void require_enumerable(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw CapacityError(std::string(what) + ": ground size " + std::to_string(n) +
                        " exceeds limit " + std::to_string(cap));
  }
}

}  // namespace dpm
