// despan command-line front end. Exit codes: 0 ok, 2 bad input, 3 --check failed.
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "despan/despan.hpp"

namespace {

using namespace despan;
using nlohmann::ordered_json;

constexpr int kExitInput = 2;
constexpr int kExitCheck = 3;

struct CheckFailed {
  std::vector<std::string> reasons;
};

void warn_psi_floor(Vertex n, double psi) {
  if (below_psi_floor(n, psi)) {
    std::cerr << "warning: psi = " << psi << " is below 1/n = " << 1.0 / n
              << "; the constructions assume psi >= 1/n\n";
  }
}

// Writes `text` to path, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void emit_sidecar(const std::string& path, const ordered_json& j) {
  if (path.empty() || path == "-") {
    std::cerr << json_text(j);
  } else {
    write_text_file(sidecar_path(path), json_text(j));
  }
}

ordered_json params_json(const DerivedParams& d) {
  return {{"nu", d.nu}, {"M", d.block_size}, {"L", d.radius}, {"tau", d.tau}};
}

struct Options {
  std::uint64_t n = 1024;
  double psi = 0.5;
  std::optional<double> psi_opt;
  double eps = 0.25;
  std::uint32_t k = 4;
  double c6 = kDefaultC6;
  double c7 = kDefaultC7;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::optional<std::uint32_t> hops;
  std::string out;
  std::string points;
  std::string graph;
  unsigned threads = 0;
  bool check = false;
  std::uint32_t sources = 0;
  std::uint64_t trial = 0;
  std::string mode = "four-hop";
  unsigned dim = 2;
  std::uint64_t pairs = 10000;
  std::uint64_t max_failures = 0;
  bool n_over_psi = false;
  std::vector<std::uint64_t> n_list;
  std::vector<double> psi_list;
  std::vector<std::uint32_t> k_list;
  std::vector<double> eps_list;
};

Vertex checked_n(std::uint64_t n) {
  require(n >= 1 && n <= 0xffffffffULL, "--n out of range");
  return static_cast<Vertex>(n);
}

void cmd_gen_clique(const Options& o) { emit(o.out, edge_list_text(complete_graph(checked_n(o.n)))); }

void cmd_gen_points(const Options& o) {
  const Vertex n = checked_n(o.n);
  require(o.dim >= 1, "--d must be >= 1");
  RandomStream stream = derive_stream(o.seed, 0);
  std::vector<double> coords(static_cast<std::size_t>(n) * o.dim);
  for (double& c : coords) c = stream.next_uniform();
  emit(o.out, points_text(PointSet(o.dim, std::move(coords))));
}

void cmd_build(const std::string& kind, const Options& o) {
  ordered_json side{{"construction", kind}, {"seed", o.seed}};
  if (kind == "euclid") {
    require(!o.points.empty(), "build euclid needs --points");
    const PointSet points = read_point_set(o.points);
    warn_psi_floor(static_cast<Vertex>(points.size()), o.psi);
    require(o.mode == "four-hop" || o.mode == "log-hop", "--mode must be four-hop or log-hop");
    EuclidOptions eo{.eps = o.eps,
                     .psi = o.psi,
                     .c7 = o.c7,
                     .mode = o.mode == "four-hop" ? EuclidMode::kFourHop : EuclidMode::kLogHop,
                     .seed = o.seed,
                     .threads = o.threads};
    const EuclidBuild b = euclidean_dependable_spanner(points, eo);
    emit(o.out, edge_list_text(b.graph.graph()));
    side.update({{"n", points.size()},
                 {"d", points.dim()},
                 {"eps", o.eps},
                 {"psi", o.psi},
                 {"c7", o.c7},
                 {"mode", o.mode},
                 {"k", b.hop_budget},
                 {"lso_eps", b.lso_eps},
                 {"family_size", b.family_size},
                 {"orderings_used", b.orderings_used},
                 {"scale", points.scale()},
                 {"edges", b.graph.edge_count()},
                 {"per_ordering", params_json(b.params)}});
    emit_sidecar(o.out, side);
    return;
  }
  const Vertex n = checked_n(o.n);
  require(n >= 2, "--n must be >= 2");
  warn_psi_floor(n, o.psi);
  RankGraph g;
  if (kind == "interval") {
    g = dependable_interval_spanner(n, o.psi, o.c6);
    side.update({{"c6", o.c6}, {"L", interval_radius(n, o.psi, o.c6)}});
  } else if (kind == "fourhop") {
    g = four_hop_spanner(n, o.psi, o.c7, o.seed);
    side.update({{"c7", o.c7}, {"k", 4}, {"params", params_json(hop_budget_params(n, o.psi, 4, o.c7))}});
  } else if (kind == "khop") {
    g = khop_spanner(n, o.psi, o.k, o.c7, o.seed);
    const SpannerParams p{.n = n, .psi = o.psi, .k = o.k, .c6 = o.c6, .c7 = o.c7, .seed = o.seed};
    side.update({{"c7", o.c7}, {"k", o.k}, {"params", params_json(derive_params(p, RadiusRule::kKHop))}});
  } else {
    throw ValidationError("unknown construction '" + kind + "' (interval, fourhop, khop, euclid)");
  }
  side.update({{"n", n}, {"psi", o.psi}, {"edges", g.edge_count()}});
  emit(o.out, edge_list_text(g));
  emit_sidecar(o.out, side);
}

void cmd_filter(const Options& o) {
  require(!o.graph.empty(), "filter needs --graph");
  const RankGraph g = read_edge_list(o.graph);
  emit(o.out, edge_list_text(filter_edges(g, o.psi, derive_stream(o.seed, o.trial))));
}

void cmd_deficiency(const Options& o) {
  require(!o.graph.empty(), "deficiency needs --graph");
  const RankGraph g = read_edge_list(o.graph);
  if (!o.psi_opt) {
    const std::uint64_t x = o.hops ? khop_deficiency(g, *o.hops) : deficiency(g);
    std::cout << x << '\n';
    return;
  }
  warn_psi_floor(g.n(), *o.psi_opt);
  const MonteCarloOptions mc{.hop_bound = o.hops, .sampled_sources = o.sources, .threads = o.threads};
  const DeficiencyReport r = monte_carlo_deficiency(g, *o.psi_opt, o.trials, o.seed, mc);
  CsvTable t("deficiency", deficiency_csv_columns());
  t.add_row(deficiency_csv_row(r));
  emit(o.out, t.text());
}

void cmd_verify_stretch(const Options& o) {
  require(!o.graph.empty() && !o.points.empty(), "verify-stretch needs --graph and --points");
  const PointSet points = read_point_set(o.points);
  const RankGraph file = read_edge_list(o.graph);
  require(file.n() == points.size(), "graph and point file sizes differ");
  // Weights are recomputed from the normalized points.
  std::vector<Edge> edges(file.edges().begin(), file.edges().end());
  std::vector<double> weights;
  for (const Edge& e : edges) weights.push_back(points.distance(e.lo - 1, e.hi - 1));
  const GeometricGraph h(RankGraph::from_sorted(file.n(), std::move(edges), std::move(weights)));
  const std::uint32_t k = o.hops.value_or(o.k);

  CsvTable t("verify-stretch", {"trial", "psi", "eps", "k", "edges", "pairs", "failures", "failure_fraction",
                                "unsound", "worst_ratio", "ref_c_psi_n", "ref_c_eps_c_psi_n"});
  std::vector<std::string> reasons;
  const double psi = o.psi_opt.value_or(1.0);
  // Budget readings assume the graph came from the Euclidean build whose hop
  // budget is k (four-hop mode for k = 4).
  const EuclidMode mode = k == 4 ? EuclidMode::kFourHop : EuclidMode::kLogHop;
  std::string ref_once = "nan";
  std::string ref_union = "nan";
  if (o.eps > 0.0 && o.eps < 1.0 && k >= 3) {
    try {
      const FailureReference ref = failure_reference(points.size(), psi, o.eps, points.dim(), mode, k);
      ref_once = format_double(ref.c_psi_n);
      ref_union = format_double(ref.c_eps_c_psi_n);
    } catch (const ValidationError&) {
      // family too fine to enumerate for this (eps, d); leave the columns as nan
    }
  }
  const std::uint64_t trials = o.psi_opt ? o.trials : 1;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const GeometricGraph g = o.psi_opt ? filter_edges(h, psi, derive_stream(o.seed, trial)) : h;
    const StretchAudit a = audit_stretch(g, points, o.eps, k, o.threads);
    t.add_row({format_int(trial), format_double(psi), format_double(o.eps), format_int(k),
               format_int(g.edge_count()), format_int(a.pairs), format_int(a.failures),
               format_double(static_cast<double>(a.failures) / a.pairs), format_int(a.unsound),
               format_double(a.worst_ratio), ref_once, ref_union});
    if (a.unsound > 0) reasons.push_back("trial " + format_int(trial) + ": " + format_int(a.unsound) + " unsound paths");
    if (a.failures > o.max_failures) {
      reasons.push_back("trial " + format_int(trial) + ": " + format_int(a.failures) + " stretch failures");
    }
  }
  emit(o.out, t.text());
  if (o.check && !reasons.empty()) throw CheckFailed{reasons};
}

void cmd_lso_check(const Options& o) {
  const Vertex n = checked_n(o.n);
  require(n >= 2, "--n must be >= 2");
  const OrderingFamily family = build_lso_family(o.eps, o.dim);
  PointSet points;
  if (!o.points.empty()) {
    points = read_point_set(o.points);
    require(points.dim() == o.dim, "--d does not match the point file");
  } else {
    RandomStream stream = derive_stream(o.seed, 0);
    std::vector<double> coords(static_cast<std::size_t>(n) * o.dim);
    for (double& c : coords) c = stream.next_uniform();
    points = PointSet(o.dim, std::move(coords));
  }
  RandomStream pick = derive_stream(o.seed, 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::uint64_t i = 0; i < o.pairs; ++i) {
    const std::size_t u = pick.next_below(points.size());
    std::size_t v = pick.next_below(points.size() - 1);
    if (v >= u) ++v;
    pairs.emplace_back(u, v);
  }
  std::vector<std::uint8_t> ok(pairs.size(), 0);
  parallel_for(pairs.size(), o.threads, [&](std::size_t i) {
    ok[i] = locality_witness(family, points, pairs[i].first, pairs[i].second).has_value();
  });
  std::uint64_t passed = 0;
  for (auto b : ok) passed += b;
  const double rate = pairs.empty() ? 1.0 : static_cast<double>(passed) / pairs.size();
  CsvTable t("lso-check", {"d", "eps", "n", "pairs", "passed", "pass_rate", "family_size", "size_bound"});
  t.add_row({format_int(o.dim), format_double(o.eps), format_int(points.size()), format_int(pairs.size()),
             format_int(passed), format_double(rate), format_int(family.size()), format_double(family.size_bound())});
  emit(o.out, t.text());
  std::vector<std::string> reasons;
  if (passed != pairs.size()) reasons.push_back(format_int(pairs.size() - passed) + " pairs without a local ordering");
  if (static_cast<double>(family.size()) > family.size_bound()) reasons.push_back("family size exceeds the bound");
  if (o.check && !reasons.empty()) throw CheckFailed{reasons};
}

void cmd_experiment(const std::string& name, const Options& o) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (!o.n_list.empty()) {
    cfg.n.clear();
    for (auto v : o.n_list) cfg.n.push_back(checked_n(v));
  }
  if (!o.psi_list.empty()) cfg.psi = o.psi_list;
  if (!o.k_list.empty()) cfg.k = o.k_list;
  if (!o.eps_list.empty()) cfg.eps = o.eps_list;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.out = o.out;
  cfg.sampled_sources = o.sources;
  cfg.hop_bound = o.hops;
  cfg.c6 = o.c6;
  cfg.c7 = o.c7;
  cfg.n_over_psi = o.n_over_psi;
  cfg.threads = o.threads;
  cfg.validate();
  for (Vertex n : cfg.n) {
    for (double psi : cfg.psi) warn_psi_floor(cfg.n_over_psi ? static_cast<Vertex>(n / psi) : n, psi);
  }
  const ExperimentResult r = run_experiment(cfg);
  emit(o.out, r.table.text());
  if (o.check && !r.violations.empty()) throw CheckFailed{r.violations};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependable spanners under random edge failure"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--out", o.out, "output path (default stdout)");
    c->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  };

  auto* gen = app.add_subcommand("gen-clique", "write K_n as an edge list");
  gen->add_option("--n", o.n)->required();
  add_common(gen);

  auto* genp = app.add_subcommand("gen-points", "write n uniform random points of [0,1)^d");
  genp->add_option("--n", o.n)->required();
  genp->add_option("--d", o.dim);
  add_common(genp);

  std::string kind;
  auto* build = app.add_subcommand("build", "build a spanner: interval | fourhop | khop | euclid");
  build->add_option("kind", kind)->required()->check(CLI::IsMember({"interval", "fourhop", "khop", "euclid"}));
  build->add_option("--n", o.n);
  build->add_option("--psi", o.psi);
  build->add_option("--eps", o.eps);
  build->add_option("--k", o.k);
  build->add_option("--c6", o.c6);
  build->add_option("--c7", o.c7);
  build->add_option("--points", o.points);
  build->add_option("--mode", o.mode, "euclid: four-hop | log-hop");
  add_common(build);

  auto* filt = app.add_subcommand("filter", "keep each edge independently with probability psi");
  filt->add_option("--graph", o.graph)->required();
  filt->add_option("--psi", o.psi)->required();
  filt->add_option("--trial", o.trial, "stream index");
  add_common(filt);

  auto* def = app.add_subcommand("deficiency", "exact deficiency, or Monte Carlo when --psi is given");
  def->add_option("--graph", o.graph)->required();
  def->add_option("--psi", o.psi_opt);
  def->add_option("--trials", o.trials);
  def->add_option("--hops", o.hops);
  def->add_option("--sources", o.sources, "sample this many sources per trial");
  add_common(def);

  auto* vs = app.add_subcommand("verify-stretch", "count pairs without a (1+eps) path of <= k hops");
  vs->add_option("--graph", o.graph)->required();
  vs->add_option("--points", o.points)->required();
  vs->add_option("--eps", o.eps);
  vs->add_option("--k", o.k);
  vs->add_option("--hops", o.hops);
  vs->add_option("--psi", o.psi_opt, "filter first, once per trial");
  vs->add_option("--trials", o.trials);
  vs->add_option("--max-failures", o.max_failures, "--check tolerance");
  vs->add_flag("--check", o.check);
  add_common(vs);

  auto* lso = app.add_subcommand("lso-check", "locality pass rate on random pairs");
  lso->add_option("--eps", o.eps);
  lso->add_option("--d", o.dim);
  lso->add_option("--n", o.n);
  lso->add_option("--pairs", o.pairs);
  lso->add_option("--points", o.points);
  lso->add_flag("--check", o.check);
  add_common(lso);

  std::string experiment;
  auto* exp = app.add_subcommand("experiment", "run an experiment and write its CSV");
  exp->add_option("name", experiment)->required()->check(CLI::IsMember(experiment_names()));
  exp->add_option("--n", o.n_list)->delimiter(',');
  exp->add_option("--psi", o.psi_list)->delimiter(',');
  exp->add_option("--k", o.k_list)->delimiter(',');
  exp->add_option("--eps", o.eps_list)->delimiter(',');
  exp->add_option("--trials", o.trials);
  exp->add_option("--hops", o.hops);
  exp->add_option("--sources", o.sources);
  exp->add_option("--c6", o.c6);
  exp->add_option("--c7", o.c7);
  exp->add_flag("--n-over-psi", o.n_over_psi, "use n/psi vertices per row");
  exp->add_flag("--check", o.check);
  add_common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) cmd_gen_clique(o);
    if (genp->parsed()) cmd_gen_points(o);
    if (build->parsed()) cmd_build(kind, o);
    if (filt->parsed()) cmd_filter(o);
    if (def->parsed()) cmd_deficiency(o);
    if (vs->parsed()) cmd_verify_stretch(o);
    if (lso->parsed()) cmd_lso_check(o);
    if (exp->parsed()) cmd_experiment(experiment, o);
  } catch (const CheckFailed& f) {
    for (const auto& r : f.reasons) std::cerr << "check failed: " << r << '\n';
    return kExitCheck;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
