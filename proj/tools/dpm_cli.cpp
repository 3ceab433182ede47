// dpm: command-line front end for the determinantal measure library.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpm/dpm.hpp"
#include "dpm/io.hpp"

namespace {

using dpm::io::json;

constexpr std::uint64_t kDefaultSeed = 1;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
};

struct Inputs {
  std::string kernel;
  std::string subspace;
  std::string include;
  std::string exclude;
};

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

dpm::Subset parse_subset(const dpm::GroundSet& g, const std::string& s) { return g.subset_of(split_labels(s)); }

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    dpm::io::write_text(g.out, text);
  }
}

void emit_json(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

dpm::Kernel apply_tol(const Globals& g, dpm::Kernel k) { return g.tol ? k.with_tolerance(*g.tol) : k; }

dpm::Kernel load_kernel(const Globals& g, const Inputs& in) {
  if (!in.kernel.empty() && !in.subspace.empty()) throw dpm::DomainError("give either --kernel or --subspace, not both");
  if (!in.kernel.empty()) return apply_tol(g, dpm::io::read_kernel(in.kernel));
  if (!in.subspace.empty()) return apply_tol(g, dpm::projection_kernel(dpm::io::read_subspace(in.subspace)));
  throw dpm::DomainError("an input --kernel or --subspace file is required");
}

void add_inputs(CLI::App* cmd, Inputs& in, bool with_spec) {
  cmd->add_option("--kernel", in.kernel, "Kernel JSON file");
  cmd->add_option("--subspace", in.subspace, "Subspace JSON file (projection kernel)");
  if (with_spec) {
    cmd->add_option("--include", in.include, "Comma-separated labels required in S");
    cmd->add_option("--exclude", in.exclude, "Comma-separated labels required outside S");
  }
}

void emit_table(const Globals& g, const dpm::DistributionTable& t, bool all) {
  if (g.format == "csv") {
    emit(g, dpm::io::to_csv(t, all));
  } else {
    emit_json(g, dpm::io::to_json(t, all));
  }
}

json marginals_json(const dpm::GroundSet& ground, const std::vector<double>& m) {
  json j = json::object();
  for (std::size_t i = 0; i < ground.size(); ++i) j[ground.label(i)] = m[i];
  return j;
}

std::vector<double> empirical_marginals(const dpm::SampleRun& run) {
  std::vector<double> m(run.ground.size(), 0.0);
  for (auto s : run.outcomes)
    for (auto i : dpm::elements(s)) m[i] += 1.0;
  for (auto& x : m) x /= static_cast<double>(run.count);
  return m;
}

std::vector<double> diagonal(const dpm::Kernel& k) {
  std::vector<double> d(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) d[i] = k(i, i).real();
  return d;
}

json terms_json(const dpm::Multivector& m) {
  json terms = json::array();
  for (const auto& [a, c] : m.terms()) {
    json s = json::array();
    for (auto i : dpm::elements(a)) s.push_back(m.ground().label(i));
    terms.push_back({{"subset", std::move(s)}, {"re", c.real()}, {"im", c.imag()}});
  }
  return terms;
}

std::vector<dpm::Complex> parse_coefficients(const std::string& s) {
  std::vector<dpm::Complex> out;
  for (const auto& tok : split_labels(s)) {
    std::size_t used = 0;
    const double x = std::stod(tok, &used);
    if (used != tok.size()) throw dpm::DomainError("bad coefficient '" + tok + "'");
    out.emplace_back(x, 0.0);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal probability measures on finite ground sets", "dpm"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 1)");
  app.add_option("--tol", g.tol, "Kernel validation tolerance override");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  Inputs in;
  bool all_subsets = false;
  int exit_code = 0;

  auto* validate = app.add_subcommand("validate", "Check that a kernel is a positive contraction");
  add_inputs(validate, in, false);
  validate->callback([&] {
    const auto k = load_kernel(g, in);
    const auto r = dpm::validate(k);
    emit_json(g, dpm::io::to_json(r));
    if (!r.pass) {
      std::cerr << "error: kernel is not a positive contraction within tolerance " << k.tolerance() << "\n";
      exit_code = 1;
    }
  });

  auto* prob = app.add_subcommand("prob", "Cylinder probability P[A in S, B outside S]");
  add_inputs(prob, in, true);
  prob->callback([&] {
    const auto k = load_kernel(g, in);
    dpm::require_valid(k, "prob");
    const auto a = parse_subset(k.ground(), in.include), b = parse_subset(k.ground(), in.exclude);
    emit_json(g, {{"version", dpm::io::kFormatVersion},
                  {"include", k.ground().format(a)},
                  {"exclude", k.ground().format(b)},
                  {"probability", dpm::cylinder_prob(k, a, b)}});
  });

  auto* enumerate = app.add_subcommand("enumerate", "Exact law of S by determinant enumeration");
  add_inputs(enumerate, in, false);
  enumerate->add_flag("--all", all_subsets, "Include zero-probability subsets");
  enumerate->callback([&] {
    const auto k = load_kernel(g, in);
    emit_table(g, dpm::enumerate(k), all_subsets);
  });

  auto* entropy = app.add_subcommand("entropy", "Shannon entropy (natural log) of the law");
  add_inputs(entropy, in, false);
  entropy->callback([&] {
    const auto k = load_kernel(g, in);
    emit_json(g, {{"version", dpm::io::kFormatVersion}, {"entropy", dpm::entropy(k)}});
  });

  std::size_t draws = 1000;
  bool random_order = false;
  std::string summary_path;
  auto* sample = app.add_subcommand("sample", "Exact sequential sampling");
  add_inputs(sample, in, false);
  sample->add_option("--n", draws, "Number of draws")->check(CLI::PositiveNumber);
  sample->add_flag("--random-order", random_order, "Visit elements in a seeded random order");
  sample->add_option("--summary", summary_path, "Write the JSON summary to this file");
  sample->callback([&] {
    const auto k = load_kernel(g, in);
    const auto run = dpm::sample_many(k, draws, g.seed, {{}, random_order});
    std::string lines;
    for (auto s : run.outcomes) lines += k.ground().format(s) + "\n";
    emit(g, lines);
    json summary = {{"version", dpm::io::kFormatVersion},
                    {"count", run.count},
                    {"seed", run.seed},
                    {"random_order", random_order},
                    {"empirical_marginals", marginals_json(k.ground(), empirical_marginals(run))},
                    {"exact_marginals", marginals_json(k.ground(), diagonal(k))}};
    if (!summary_path.empty()) {
      dpm::io::write_text(summary_path, summary.dump(2) + "\n");
    } else if (!g.out.empty()) {
      std::cout << summary.dump(2) << "\n";
    }
  });

  auto* condition = app.add_subcommand("condition", "Condition on A in S and B outside S");
  add_inputs(condition, in, true);
  condition->callback([&] {
    if (!in.subspace.empty() && in.kernel.empty()) {
      const auto h = dpm::io::read_subspace(in.subspace);
      const dpm::ConditionSpec spec{parse_subset(h.ground(), in.include), parse_subset(h.ground(), in.exclude)};
      emit_json(g, dpm::io::to_json(dpm::subspace_condition(h, spec)));
      return;
    }
    const auto k = load_kernel(g, in);
    const dpm::ConditionSpec spec{parse_subset(k.ground(), in.include), parse_subset(k.ground(), in.exclude)};
    emit_json(g, dpm::io::to_json(dpm::condition(k, spec)));
  });

  auto* dual = app.add_subcommand("dual", "Kernel I - Q of the complement");
  add_inputs(dual, in, false);
  dual->callback([&] { emit_json(g, dpm::io::to_json(dpm::dual(load_kernel(g, in)))); });

  auto* dilate = app.add_subcommand("dilate", "Projection on E plus a hat copy compressing to Q");
  add_inputs(dilate, in, false);
  dilate->callback([&] { emit_json(g, dpm::io::to_json(dpm::dilate(load_kernel(g, in)))); });

  std::string graph_path;
  bool enumerate_trees = false;
  std::size_t tree_samples = 0;
  auto* ust = app.add_subcommand("ust", "Uniform (weighted) spanning tree of a graph");
  ust->add_option("--graph", graph_path, "Graph JSON file")->required();
  ust->add_flag("--enumerate", enumerate_trees, "Report the exact law over spanning trees");
  ust->add_option("--samples", tree_samples, "Number of sampled trees");
  ust->callback([&] {
    const auto graph = dpm::io::read_graph(graph_path);
    const auto k = apply_tol(g, dpm::transfer_current(graph));
    // the law lives on (|V| - 1)-subsets; drop round-off mass elsewhere
    const auto trees = [&] {
      auto mass = dpm::enumerate(k).mass();
      const int rank = static_cast<int>(graph.vertex_count()) - 1;
      for (dpm::Subset s = 0; s < mass.size(); ++s)
        if (dpm::popcount(s) != rank || mass[s] < dpm::kSupportFloor) mass[s] = 0.0;
      return dpm::DistributionTable(k.ground(), std::move(mass));
    };
    if (enumerate_trees && g.format == "csv") {
      emit(g, dpm::io::to_csv(trees()));
      return;
    }
    json j = {{"version", dpm::io::kFormatVersion},
              {"tree_count", dpm::tree_count(graph)},
              {"marginals", marginals_json(k.ground(), diagonal(k))}};
    if (enumerate_trees) j["trees"] = dpm::io::to_json(trees())["entries"];
    if (tree_samples > 0) {
      const auto run = dpm::sample_many(k, tree_samples, g.seed);
      j["samples"] = tree_samples;
      j["seed"] = g.seed;
      j["empirical_marginals"] = marginals_json(k.ground(), empirical_marginals(run));
    }
    emit_json(g, j);
  });

  bool check_only = false;
  std::string first_path, second_path;
  std::size_t zn_order = 3;
  auto* couple = app.add_subcommand("couple", "Coupling feasibility searches");
  couple->require_subcommand(1);
  couple->add_flag("--check-only", check_only, "Report feasibility without the witness");
  auto* dominate = couple->add_subcommand("dominate", "Monotone coupling of P1 below P2 (max-flow)");
  dominate->add_option("--first", first_path, "Kernel or subspace JSON of the smaller law")->required();
  dominate->add_option("--second", second_path, "Kernel or subspace JSON of the larger law")->required();
  auto read_any = [&](const std::string& path) {
    return apply_tol(g, dpm::io::kernel_or_projection_from_json(dpm::io::read_json(path), path));
  };
  dominate->callback([&] {
    const auto r = dpm::check_domination(dpm::enumerate(read_any(first_path)), dpm::enumerate(read_any(second_path)));
    emit_json(g, dpm::io::to_json(r, !check_only));
  });
  auto* union_cmd = couple->add_subcommand("union", "Disjoint coupling of H1, H2 with the law of H1 + H2 as union");
  union_cmd->add_option("--first", first_path, "Subspace JSON of H1")->required();
  union_cmd->add_option("--second", second_path, "Subspace JSON of H2, orthogonal to H1")->required();
  union_cmd->callback([&] {
    const auto r = dpm::find_disjoint_union_coupling(dpm::io::read_subspace(first_path), dpm::io::read_subspace(second_path));
    emit_json(g, dpm::io::to_json(r, !check_only));
  });
  auto* zn = couple->add_subcommand("zn", "Complete coupling of the character measures of Z_n");
  zn->add_option("--n", zn_order, "Group order (1..6)")->required();
  zn->callback([&] { emit_json(g, dpm::io::to_json(dpm::complete_coupling_zn(zn_order), !check_only)); });

  std::string suite, config_path, report_path;
  std::optional<std::size_t> suite_n, suite_trials;
  std::optional<std::uint64_t> suite_seed;
  std::optional<std::string> suite_ensemble;
  auto* experiments = app.add_subcommand("experiments", "Randomised theorem checks and conjecture probes");
  experiments->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(dpm::suite_names()));
  experiments->add_option("--config", config_path, "JSON config {n, trials, seed, ensemble}");
  experiments->add_option("--report", report_path, "Write the CheckReport JSON here");
  experiments->add_option("--n", suite_n, "Ground set size");
  experiments->add_option("--trials", suite_trials, "Number of random instances");
  experiments->add_option("--ensemble", suite_ensemble, "Kernel ensemble: projection|contraction|toeplitz");
  experiments->callback([&] {
    dpm::SuiteConfig cfg;
    cfg.seed = g.seed;
    if (!config_path.empty()) {
      const auto j = dpm::io::read_json(config_path);
      if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
      if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
      if (j.contains("seed")) suite_seed = j["seed"].get<std::uint64_t>();
      if (j.contains("ensemble")) cfg.ensemble = j["ensemble"].get<std::string>();
    }
    if (suite_seed) cfg.seed = *suite_seed;
    // explicit command-line flags win over the config file
    if (app.get_option("--seed")->count() > 0) cfg.seed = g.seed;
    if (suite_n) cfg.n = *suite_n;
    if (suite_trials) cfg.trials = *suite_trials;
    if (suite_ensemble) cfg.ensemble = *suite_ensemble;
    const auto report = dpm::run_suite(suite, cfg);
    const std::string text = dpm::io::to_json(report).dump(2) + "\n";
    if (!report_path.empty()) {
      dpm::io::write_text(report_path, text);
    } else {
      emit(g, text);
    }
    if (report.theorem && !report.pass) {
      std::cerr << "error: " << suite << " failed with margin " << report.worst_margin << "\n";
      exit_code = 2;
    }
  });

  auto* oracle = app.add_subcommand("oracle", "Exterior-algebra cylinder probability with term lists");
  oracle->add_option("--subspace", in.subspace, "Subspace JSON file")->required();
  oracle->add_option("--include", in.include, "Comma-separated labels required in S");
  oracle->add_option("--exclude", in.exclude, "Comma-separated labels required outside S");
  oracle->callback([&] {
    const auto h = dpm::io::read_subspace(in.subspace);
    const auto a = parse_subset(h.ground(), in.include), b = parse_subset(h.ground(), in.exclude);
    if (a & b) throw dpm::DomainError("include and exclude overlap");
    const auto xi = dpm::xi(h);
    const auto theta = dpm::Multivector::theta(h.ground(), a | b);
    emit_json(g, {{"version", dpm::io::kFormatVersion},
                  {"xi", terms_json(xi)},
                  {"theta", terms_json(theta)},
                  {"probability", dpm::oracle_cylinder(h, a, b)},
                  {"determinant", dpm::cylinder_prob(dpm::projection_kernel(h), a, b)}});
  });

  std::string zoo_name;
  std::size_t zoo_n = 4;
  double zoo_p = 0.5, zoo_a = 0.4;
  std::string zoo_coefficients = "0.5,0.25", zoo_frequencies = "0";
  auto* zoo = app.add_subcommand("zoo", "Write a named example kernel");
  zoo->add_option("name", zoo_name, "bernoulli|renewal|toeplitz|zn|complete-graph|contraction|projection")
      ->required()
      ->check(CLI::IsMember({"bernoulli", "renewal", "toeplitz", "zn", "complete-graph", "contraction", "projection"}));
  zoo->add_option("--n", zoo_n, "Ground set size (vertices for complete-graph)");
  zoo->add_option("--p", zoo_p, "Bernoulli inclusion probability");
  zoo->add_option("--a", zoo_a, "Renewal parameter in (0,1)");
  zoo->add_option("--coefficients", zoo_coefficients, "Toeplitz coefficients c0,c1,... (real)");
  zoo->add_option("--frequencies", zoo_frequencies, "Character frequencies for zn, e.g. 0,2");
  zoo->callback([&] {
    dpm::Kernel k;
    if (zoo_name == "bernoulli") {
      k = dpm::bernoulli(zoo_n, zoo_p);
    } else if (zoo_name == "renewal") {
      k = dpm::renewal_truncated(zoo_n, zoo_a);
    } else if (zoo_name == "toeplitz") {
      k = dpm::toeplitz_from_symbol(zoo_n, parse_coefficients(zoo_coefficients));
    } else if (zoo_name == "zn") {
      dpm::Subset j = 0;
      for (const auto& f : split_labels(zoo_frequencies)) j |= dpm::singleton(std::stoul(f));
      k = dpm::zn_character(zoo_n, j);
    } else if (zoo_name == "complete-graph") {
      k = dpm::transfer_current(dpm::Graph::complete(zoo_n));
    } else {
      dpm::Rng rng(g.seed);
      k = zoo_name == "contraction" ? dpm::random::contraction(rng, zoo_n) : dpm::random::projection(rng, zoo_n);
    }
    emit_json(g, dpm::io::to_json(apply_tol(g, k)));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dpm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
