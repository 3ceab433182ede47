#pragma once

// Small dense solvers behind the coupling searches: phase-1 simplex for
// feasibility of {x >= 0 : A x = b}, and Dinic max-flow on real capacities.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "dpm/core.hpp"

namespace dpm::lp {

// Sparse column of a constraint matrix.
struct Column {
  std::vector<std::pair<std::size_t, double>> entries;  // (row, value)
};

struct FeasibilityProblem {
  std::size_t rows = 0;
  std::vector<Column> columns;
  std::vector<double> rhs;
};

struct SimplexResult {
  bool feasible = false;
  std::vector<double> x;
  double infeasibility = 0.0;  // phase-1 optimum: Σ artificial values
  double max_violation = 0.0;  // max |A x - b| at the returned x
  std::size_t pivots = 0;
};

inline double max_violation(const FeasibilityProblem& p, const std::vector<double>& x) {
  std::vector<double> ax(p.rows, 0.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < p.columns.size(); ++j) {
    if (x[j] < 0.0) worst = std::max(worst, -x[j]);
    for (const auto& [r, v] : p.columns[j].entries) ax[r] += v * x[j];
  }
  for (std::size_t r = 0; r < p.rows; ++r) worst = std::max(worst, std::abs(ax[r] - p.rhs[r]));
  return worst;
}

/// Phase-1 simplex on the dense tableau [A | I | b] with artificial slacks.
/// Entering variable by Bland's rule (lowest index with negative reduced
/// cost), leaving row by minimum ratio with lowest-index tie breaking, so the
/// method cannot cycle.
inline SimplexResult phase_one(const FeasibilityProblem& problem, double threshold = 1e-7) {
  const std::size_t m = problem.rows;
  const std::size_t n = problem.columns.size();
  const std::size_t width = n + m + 1;  // structural | artificial | rhs
  constexpr double kEps = 1e-11;   // reduced-cost tolerance
  constexpr double kPivot = 1e-9;  // smallest admissible pivot
  if (problem.rhs.size() != m) throw StructuralError("simplex: rhs length differs from row count");

  std::vector<double> t(m * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& [r, v] : problem.columns[j].entries) {
      if (r >= m) throw StructuralError("simplex: column references row out of range");
      at(r, j) += v;
    }
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = problem.rhs[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) at(r, j) *= sign;
    at(r, n + r) = 1.0;
    at(r, n + m) = sign * problem.rhs[r];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  // reduced costs of the phase-1 objective Σ artificials
  std::vector<double> cost(width, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < width; ++c) cost[c] -= at(r, c);
  for (std::size_t r = 0; r < m; ++r) cost[n + r] = 0.0;

  SimplexResult out;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  while (out.pivots < max_pivots) {
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (cost[c] < -kEps) {
        enter = c;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = at(r, enter);
      if (a <= kPivot) continue;
      const double ratio = std::max(at(r, n + m), 0.0) / a;
      if (ratio < best - 1e-14) {
        best = ratio;
        leave = r;
      } else if (ratio <= best + 1e-14 && basis[r] < basis[leave]) {
        leave = r;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for phase 1
    const double pivot = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= pivot;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
      at(r, enter) = 0.0;
    }
    const double f = cost[enter];
    for (std::size_t c = 0; c < width; ++c) cost[c] -= f * at(leave, c);
    cost[enter] = 0.0;
    basis[leave] = enter;
    ++out.pivots;
  }

  out.x.assign(n, 0.0);
  out.infeasibility = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double value = std::max(at(r, n + m), 0.0);
    if (basis[r] < n) out.x[basis[r]] = value;
    else out.infeasibility += value;
  }
  out.max_violation = max_violation(problem, out.x);
  out.feasible = out.infeasibility <= threshold && out.max_violation <= threshold;
  return out;
}

/// Dinic max-flow with real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

  // Returns the arc index for later flow queries.
  std::size_t add_arc(std::size_t from, std::size_t to, double capacity) {
    arcs_.push_back({to, capacity, 0.0});
    adj_[from].push_back(arcs_.size() - 1);
    arcs_.push_back({from, 0.0, 0.0});
    adj_[to].push_back(arcs_.size() - 1);
    return arcs_.size() - 2;
  }

  double flow(std::size_t arc) const { return arcs_[arc].flow; }

  double run(std::size_t source, std::size_t sink) {
    double total = 0.0;
    while (levels(source, sink)) {
      next_.assign(adj_.size(), 0);
      while (true) {
        const double pushed = push(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Arc {
    std::size_t to;
    double capacity;
    double flow;
  };
  static constexpr double kEps = 1e-15;

  double residual(std::size_t a) const { return arcs_[a].capacity - arcs_[a].flow; }

  bool levels(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto a : adj_[u]) {
        const auto v = arcs_[a].to;
        if (level_[v] < 0 && residual(a) > kEps) {
          level_[v] = level_[u] + 1;
          q.push(v);
        }
      }
    }
    return level_[t] >= 0;
  }

  double push(std::size_t u, std::size_t t, double limit) {
    if (u == t) return limit;
    for (auto& i = next_[u]; i < adj_[u].size(); ++i) {
      const auto a = adj_[u][i];
      const auto v = arcs_[a].to;
      if (level_[v] != level_[u] + 1 || residual(a) <= kEps) continue;
      const double got = push(v, t, std::min(limit, residual(a)));
      if (got > kEps) {
        arcs_[a].flow += got;
        arcs_[a ^ 1].flow -= got;
        return got;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace dpm::lp
