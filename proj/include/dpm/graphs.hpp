#pragma once

// Graphic matroids: star spaces, transfer currents, weighted spanning tree
// measures and Kirchhoff current decompositions.

#include <numeric>

#include "dpm/kernels.hpp"
#include "dpm/measure.hpp"
#include "dpm/random.hpp"

namespace dpm {

struct Edge {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  double weight = 1.0;
};

class Graph {
 public:
  Graph(std::vector<std::string> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (vertices_.empty()) throw DomainError("graph has no vertices");
    std::vector<std::string> ids;
    for (const auto& e : edges_) {
      if (e.tail >= vertices_.size() || e.head >= vertices_.size())
        throw StructuralError("edge '" + e.id + "' references an unknown vertex");
      if (!(e.weight > 0.0)) throw DomainError("edge '" + e.id + "' has nonpositive weight");
      ids.push_back(e.id);
    }
    edge_ground_ = GroundSet(std::move(ids));
    GroundSet check_vertices(vertices_);  // rejects duplicate vertex labels
  }

  // Unit-weight graph on vertices 0..n-1 with edges "tail-head".
  static Graph from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(std::to_string(i));
    std::vector<Edge> e;
    for (const auto& [t, h] : pairs) e.push_back({std::to_string(t) + "-" + std::to_string(h), t, h, 1.0});
    // parallel edges get distinct ids
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (e[j].id == e[i].id) e[i].id += "'" + std::to_string(i);
    return Graph(std::move(v), std::move(e));
  }

  static Graph complete(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return from_pairs(n, pairs);
  }

  static Graph path(std::size_t vertices) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i + 1 < vertices; ++i) pairs.emplace_back(i, i + 1);
    return from_pairs(vertices, pairs);
  }

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const GroundSet& edge_ground() const { return edge_ground_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Vertex sets of the connected components, as lists of vertex indices.
  std::vector<std::vector<std::size_t>> components() const {
    std::vector<std::size_t> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges_) parent[find(e.tail)] = find(e.head);
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(vertices_.size(), SIZE_MAX);
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      const auto r = find(v);
      if (slot[r] == SIZE_MAX) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].push_back(v);
    }
    return out;
  }

  void require_connected() const {
    const auto comps = components();
    if (comps.size() == 1) return;
    std::string report;
    for (const auto& c : comps) {
      report += report.empty() ? "{" : " {";
      for (std::size_t i = 0; i < c.size(); ++i) report += (i ? "," : "") + vertices_[c[i]];
      report += "}";
    }
    throw DomainError("graph is disconnected: " + std::to_string(comps.size()) + " components " + report);
  }

  // Weighted incidence: column x is the star √w(e) a(x, e) over edges, with
  // a(x, e) = +1 at the tail, -1 at the head and 0 for self-loops.
  Matrix star_vectors() const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(edges_.size()), static_cast<Eigen::Index>(vertices_.size()));
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      if (e.tail == e.head) continue;
      const double s = std::sqrt(e.weight);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.tail)) += s;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.head)) -= s;
    }
    return m;
  }

  std::vector<double> weights() const {
    std::vector<double> w;
    for (const auto& e : edges_) w.push_back(e.weight);
    return w;
  }

  // Same graph with every edge reversed.
  Graph flipped() const {
    auto e = edges_;
    for (auto& x : e) std::swap(x.tail, x.head);
    return Graph(vertices_, std::move(e));
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  GroundSet edge_ground_;
};

inline Subspace star_space(const Graph& g) {
  g.require_connected();
  Subspace out = Subspace::span(g.edge_ground(), g.star_vectors());
  if (out.rank() + 1 != g.vertex_count())
    throw ConsistencyError("star space rank " + std::to_string(out.rank()) + " differs from |V|-1");
  return out;
}

inline Kernel transfer_current(const Graph& g) { return projection_kernel(star_space(g)); }

// Matrix-Tree theorem: determinant of the weighted Laplacian with one vertex removed.
inline double tree_count(const Graph& g) {
  g.require_connected();
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  if (n == 1) return 1.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    if (e.tail == e.head) continue;
    const auto t = static_cast<Eigen::Index>(e.tail);
    const auto h = static_cast<Eigen::Index>(e.head);
    lap(t, t) += e.weight;
    lap(h, h) += e.weight;
    lap(t, h) -= e.weight;
    lap(h, t) -= e.weight;
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(lap.bottomRightCorner(n - 1, n - 1)).determinant();
}

// Random connected multigraph: a random tree plus extra edges (occasional
// parallel edges and self-loops), positive weights.
inline Graph random_connected_graph(Rng& rng, std::size_t vertices, std::size_t extra_edges, bool weighted = true) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < vertices; ++i) v.push_back("v" + std::to_string(i));
  std::vector<Edge> edges;
  auto weight = [&] { return weighted ? rng.uniform(0.25, 4.0) : 1.0; };
  for (std::size_t i = 1; i < vertices; ++i) {
    const auto parent = static_cast<std::size_t>(rng.below(i));
    const bool flip = rng.below(2) == 1;
    edges.push_back({"e" + std::to_string(edges.size()), flip ? i : parent, flip ? parent : i, weight()});
  }
  for (std::size_t k = 0; k < extra_edges; ++k) {
    const auto a = static_cast<std::size_t>(rng.below(vertices));
    const auto b = static_cast<std::size_t>(rng.below(vertices));
    edges.push_back({"e" + std::to_string(edges.size()), a, b, weight()});
  }
  return Graph(std::move(v), std::move(edges));
}

// ---------------------------------------------------------------------------
// Kirchhoff decompositions

inline constexpr double kKirchhoffResidual = 1e-8;

/// ζ^v_B = Σ_{e in B} a_v(e, B) e where P_H v = Σ_{e in B} a_v(e, B) P_H e.
inline Vector kirchhoff_vector(const Subspace& h, const Vector& v, Subset base) {
  if (static_cast<std::size_t>(v.size()) != h.size()) throw StructuralError("kirchhoff_vector: vector length mismatch");
  const auto idx = elements(base);
  const Matrix p = h.projection();
  if (idx.empty()) {
    const double residual = (p * v).cwiseAbs().maxCoeff();
    if (residual > kKirchhoffResidual)
      throw ConsistencyError("kirchhoff_vector: residual " + std::to_string(residual) + " (v not decomposable over B)");
    return Vector::Zero(v.size());
  }
  Matrix cols(p.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = p.col(static_cast<Eigen::Index>(idx[k]));
  Eigen::ColPivHouseholderQR<Matrix> qr(cols);
  qr.setThreshold(1e-10);
  if (static_cast<std::size_t>(qr.rank()) != idx.size())
    throw ConsistencyError("kirchhoff_vector: projected base vectors are linearly dependent");
  const Vector target = p * v;
  const Vector a = qr.solve(target);
  const double residual = (cols * a - target).cwiseAbs().maxCoeff();
  if (residual > kKirchhoffResidual)
    throw ConsistencyError("kirchhoff_vector: residual " + std::to_string(residual) + " (v not decomposable over B)");
  Vector zeta = Vector::Zero(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) zeta[static_cast<Eigen::Index>(idx[k])] = a[static_cast<Eigen::Index>(k)];
  return zeta;
}

namespace detail {

// Only bases (|B| = rank) carry mass. Below this mass a base may be a
// numerically dependent set whose true probability is zero; it is skipped
// when its projected vectors turn out dependent.
inline constexpr double kNullBaseMass = 1e-12;

inline Vector average_kirchhoff(const Subspace& h, const Vector& v, const DistributionTable& table, Subset f, Subset s) {
  Vector acc = Vector::Zero(v.size());
  double total = 0.0;
  for (Subset b = 0; b < table.mass().size(); ++b) {
    const double m = table[b];
    if (m <= 0.0 || (b & f) != s || static_cast<std::size_t>(popcount(b)) != h.rank()) continue;
    if (m <= kNullBaseMass) {
      try {
        acc += m * kirchhoff_vector(h, v, b);
      } catch (const ConsistencyError&) {
        continue;
      }
    } else {
      acc += m * kirchhoff_vector(h, v, b);
    }
    total += m;
  }
  return acc / total;
}

}  // namespace detail

/// E^H ζ^v_B by enumeration; checked against P_H v.
inline Vector expected_kirchhoff(const Subspace& h, const Vector& v) {
  require_enumerable(h.size(), 12, "expected_kirchhoff");
  const auto table = enumerate(h);
  const Vector out = detail::average_kirchhoff(h, v, table, 0, 0);
  const double gap = (out - h.project(v)).cwiseAbs().maxCoeff();
  if (gap > 1e-8) throw ConsistencyError("expected Kirchhoff vector differs from P_H v by " + std::to_string(gap));
  return out;
}

/// P_{H^F_S} e with H^F_S = (H + [F \ S]) ∩ [F]⊥, cross-checked against
/// P_[F]⊥ E^H[ζ^e_B | B ∩ F = S].
inline Vector conditioned_kirchhoff(const Subspace& h, Subset f, Subset s, std::size_t e) {
  require_enumerable(h.size(), 10, "conditioned_kirchhoff");
  if (!is_subset(s, f)) throw DomainError("conditioned_kirchhoff: S must be a subset of F");
  if (e >= h.size() || contains(f, e)) throw DomainError("conditioned_kirchhoff: e must lie outside F");
  const auto table = enumerate(h);
  const double p = table.cylinder(s, f & ~s);
  if (p <= h.tolerance()) throw ImpossibleEventError("conditioned_kirchhoff: P[B ∩ F = S] = " + std::to_string(p));
  const GroundSet& g = h.ground();
  const Subspace hfs = (h + Subspace::coordinate(g, f & ~s)).intersect(Subspace::coordinate(g, g.all() & ~f));
  Vector unit = Vector::Zero(static_cast<Eigen::Index>(h.size()));
  unit[static_cast<Eigen::Index>(e)] = 1.0;
  const Vector left = hfs.project(unit);
  Vector right = detail::average_kirchhoff(h, unit, table, f, s);
  for (auto i : elements(f)) right[static_cast<Eigen::Index>(i)] = 0.0;
  const double gap = (left - right).cwiseAbs().maxCoeff();
  if (gap > 1e-7) throw ConsistencyError("conditioned Kirchhoff identity fails by " + std::to_string(gap));
  return left;
}

}  // namespace dpm
