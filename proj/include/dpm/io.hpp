#pragma once

// File formats: kernels, subspaces and graphs as JSON; distribution tables
// as CSV or JSON; machine-readable reports.

#include <fstream>
#include <iomanip>
#include "json.hpp"
#include <sstream>

#include "dpm/checks.hpp"
#include "dpm/coupling.hpp"
#include "dpm/graphs.hpp"
#include "dpm/kernel.hpp"
#include "dpm/measure.hpp"

namespace dpm::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct FormatError : Error {
  using Error::Error;
};

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::string& path) { return parse_json(read_text(path), path); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << text;
}

namespace detail {

inline const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(where + ": missing field '" + name + "'");
  return *it;
}

inline Eigen::MatrixXd real_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array of rows");
  const auto rows = j.size();
  std::size_t cols = rows == 0 ? 0 : (j[0].is_array() ? j[0].size() : 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw FormatError(where + "[" + std::to_string(r) + "]: expected a row of " + std::to_string(cols) + " numbers");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw FormatError(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

inline Matrix complex_matrix(const json& j, const std::string& where) {
  const Eigen::MatrixXd re = real_matrix(field(j, "re", where), where + ".re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = real_matrix(j["im"], where + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw FormatError(where + ": 're' and 'im' shapes differ");
  }
  Matrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

inline GroundSet labels(const json& j, const std::string& where) {
  const json& l = field(j, "labels", where);
  if (!l.is_array()) throw FormatError(where + ".labels: expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l[i].is_string()) throw FormatError(where + ".labels[" + std::to_string(i) + "]: expected a string");
    out.push_back(l[i].get<std::string>());
  }
  return GroundSet(std::move(out));
}

inline json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline Kernel kernel_from_json(const json& j, const std::string& where = "kernel") {
  GroundSet g = detail::labels(j, where);
  Matrix m = detail::complex_matrix(j, where);
  const double tol = j.contains("tolerance") ? j["tolerance"].get<double>() : kDefaultTolerance;
  return Kernel(std::move(g), std::move(m), tol);
}

inline json to_json(const Kernel& k) {
  json j;
  j["kind"] = "kernel";
  j["labels"] = k.ground().labels();
  j["re"] = detail::matrix_json(k.entries().real());
  if (k.size() > 0 && k.entries().imag().cwiseAbs().maxCoeff() > 0.0) j["im"] = detail::matrix_json(k.entries().imag());
  j["tolerance"] = k.tolerance();
  return j;
}

// Basis columns stored row-per-label: re[i][j] is entry i of basis vector j.
inline Subspace subspace_from_json(const json& j, const std::string& where = "subspace") {
  GroundSet g = detail::labels(j, where);
  Matrix m = detail::complex_matrix(j, where);
  if (m.rows() == 0 && g.size() > 0) m = Matrix(static_cast<Eigen::Index>(g.size()), 0);
  const double tol = j.contains("tolerance") ? j["tolerance"].get<double>() : kDefaultTolerance;
  return Subspace(std::move(g), std::move(m), tol);
}

inline json to_json(const Subspace& h) {
  json j;
  j["kind"] = "subspace";
  j["labels"] = h.ground().labels();
  j["re"] = detail::matrix_json(h.basis().real());
  if (h.rank() > 0 && h.basis().imag().cwiseAbs().maxCoeff() > 0.0) j["im"] = detail::matrix_json(h.basis().imag());
  j["tolerance"] = h.tolerance();
  return j;
}

inline Kernel read_kernel(const std::string& path) { return kernel_from_json(read_json(path), path); }

// A kernel file, or a subspace file (marked "kind": "subspace") read as its projection kernel.
inline Kernel kernel_or_projection_from_json(const json& j, const std::string& where) {
  if (j.is_object() && j.value("kind", "") == "subspace") return projection_kernel(subspace_from_json(j, where));
  return kernel_from_json(j, where);
}
inline Subspace read_subspace(const std::string& path) { return subspace_from_json(read_json(path), path); }

inline Graph graph_from_json(const json& j, const std::string& where = "graph") {
  const json& v = detail::field(j, "vertices", where);
  if (!v.is_array()) throw FormatError(where + ".vertices: expected an array of strings");
  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw FormatError(where + ".vertices[" + std::to_string(i) + "]: expected a string");
    vertices.push_back(v[i].get<std::string>());
  }
  auto vertex_index = [&](const json& e, const char* name, const std::string& at) {
    const json& x = detail::field(e, name, at);
    if (!x.is_string()) throw FormatError(at + "." + name + ": expected a vertex label");
    const auto s = x.get<std::string>();
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == s) return i;
    throw FormatError(at + "." + name + ": unknown vertex '" + s + "'");
  };
  const json& es = detail::field(j, "edges", where);
  if (!es.is_array()) throw FormatError(where + ".edges: expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string at = where + ".edges[" + std::to_string(i) + "]";
    const json& id = detail::field(es[i], "id", at);
    if (!id.is_string()) throw FormatError(at + ".id: expected a string");
    Edge e{id.get<std::string>(), vertex_index(es[i], "tail", at), vertex_index(es[i], "head", at), 1.0};
    if (es[i].contains("w")) {
      if (!es[i]["w"].is_number()) throw FormatError(at + ".w: expected a number");
      e.weight = es[i]["w"].get<double>();
    }
    edges.push_back(std::move(e));
  }
  return Graph(std::move(vertices), std::move(edges));
}

inline json to_json(const Graph& g) {
  json j;
  j["vertices"] = g.vertices();
  j["edges"] = json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back({{"id", e.id}, {"tail", g.vertices()[e.tail]}, {"head", g.vertices()[e.head]}, {"w", e.weight}});
  return j;
}

inline Graph read_graph(const std::string& path) { return graph_from_json(read_json(path), path); }

inline std::string format_double(double x) {
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

// mask,subset,probability with the label list quoted.
inline std::string to_csv(const DistributionTable& t, bool include_zero = false) {
  std::string out = "mask,subset,probability\n";
  for (Subset s = 0; s < t.mass().size(); ++s) {
    if (!include_zero && t[s] == 0.0) continue;
    out += std::to_string(s) + ",\"" + t.ground().format(s) + "\"," + format_double(t[s]) + "\n";
  }
  return out;
}

inline json to_json(const DistributionTable& t, bool include_zero = false) {
  json j;
  j["version"] = kFormatVersion;
  j["labels"] = t.ground().labels();
  j["entries"] = json::array();
  for (Subset s = 0; s < t.mass().size(); ++s) {
    if (!include_zero && t[s] == 0.0) continue;
    json subset = json::array();
    for (auto i : elements(s)) subset.push_back(t.ground().label(i));
    j["entries"].push_back({{"mask", s}, {"subset", std::move(subset)}, {"probability", t[s]}});
  }
  if (t.samples() > 0) j["samples"] = t.samples();
  return j;
}

inline json to_json(const ValidationReport& r) {
  json j;
  j["version"] = kFormatVersion;
  j["pass"] = r.pass;
  j["hermitian_defect"] = r.hermitian_defect;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["max_eigenvalue"] = r.max_eigenvalue;
  j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  return j;
}

inline json to_json(const IncreasingEvent& e, const GroundSet& g) {
  json gens = json::array();
  // minimal elements
  const auto& ind = e.indicator();
  for (Subset a = 0; a < ind.size(); ++a) {
    if (!ind[a]) continue;
    bool minimal = true;
    for (Subset b = a; b != 0 && minimal; b &= b - 1)
      if (ind[a & ~(b & (~b + 1))]) minimal = false;
    if (minimal) {
      json s = json::array();
      for (auto i : elements(expand(a, e.support()))) s.push_back(g.label(i));
      gens.push_back(std::move(s));
    }
  }
  json sup = json::array();
  for (auto i : elements(e.support())) sup.push_back(g.label(i));
  return {{"support", std::move(sup)}, {"minimal_sets", std::move(gens)}};
}

inline json to_json(const CheckReport& r) {
  json j;
  j["version"] = kFormatVersion;
  j["suite"] = r.suite;
  j["kind"] = r.theorem ? "theorem" : "probe";
  j["instances"] = r.instances;
  j["worst_margin"] = std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr);
  j["pass"] = r.pass;
  j["flagged"] = r.flagged;
  j["seed"] = r.seed;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    json cj;
    cj["margin"] = c.margin;
    cj["note"] = c.note;
    cj["kernels"] = json::array();
    for (const auto& k : c.kernels) cj["kernels"].push_back(to_json(k));
    if (c.table) cj["table"] = to_json(*c.table);
    const GroundSet& g = c.table ? c.table->ground() : c.kernels.at(0).ground();
    cj["events"] = json::array();
    for (const auto& e : c.events) cj["events"].push_back(to_json(e, g));
    if (c.k) cj["K"] = g.format(c.k);
    if (c.f) cj["F"] = g.format(c.f);
    j["counterexample"] = std::move(cj);
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

inline json to_json(const CouplingTable& c) {
  json entries = json::array();
  for (const auto& [k, m] : c.mass()) {
    if (m <= 0.0) continue;
    json a = json::array(), b = json::array();
    for (auto i : elements(k.first)) a.push_back(c.ground().label(i));
    for (auto i : elements(k.second)) b.push_back(c.ground().label(i));
    entries.push_back({{"first", std::move(a)}, {"second", std::move(b)}, {"probability", m}});
  }
  return {{"labels", c.ground().labels()}, {"entries", std::move(entries)}};
}

inline json to_json(const FeasibilityResult& r, bool with_witness = true) {
  json j;
  j["version"] = kFormatVersion;
  j["feasible"] = r.feasible;
  j["max_violation"] = r.max_violation;
  j["variables"] = r.variables;
  j["constraints"] = r.constraints;
  if (with_witness && r.witness) j["witness"] = to_json(*r.witness);
  if (with_witness && r.permutations) {
    json atoms = json::array();
    for (const auto& [perm, m] : r.permutations->atoms) atoms.push_back({{"image", perm}, {"probability", m}});
    j["permutations"] = std::move(atoms);
  }
  return j;
}

}  // namespace dpm::io
