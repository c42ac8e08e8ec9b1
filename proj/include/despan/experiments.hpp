#ifndef DESPAN_EXPERIMENTS_HPP
#define DESPAN_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "despan/error.hpp"
#include "despan/io.hpp"
#include "despan/parallel.hpp"
#include "despan/rank_graph.hpp"
#include "despan/reachability.hpp"
#include "despan/spanners_1d.hpp"

// Experiment harness. Every row uses the configured seed as the Monte Carlo
// master, so trial t of any row filters with derive_stream(seed, t). Because
// edge survival is keyed by the pair, nested graphs see coupled failures.
namespace despan {

struct ExperimentConfig {
  std::string name;
  std::vector<Vertex> n{1024};
  std::vector<double> psi{0.5};
  std::vector<std::uint32_t> k{4};
  std::vector<double> eps{0.25};
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::uint32_t sampled_sources = 0;
  std::optional<std::uint32_t> hop_bound;
  double c6 = kDefaultC6;
  double c7 = kDefaultC7;
  bool n_over_psi = false;  // clique-scaling: use n / psi vertices per row
  unsigned threads = 0;

  void validate() const;
};

struct ExperimentResult {
  CsvTable table;
  std::vector<std::string> violations;  // threshold checks that failed
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"clique-scaling", "spanner-vs-clique", "sparse-failure",
                                              "hop-survival", "edge-scaling"};
  return names;
}

inline void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  require(std::find(names.begin(), names.end(), name) != names.end(), "unknown experiment '" + name + "'");
  require(!n.empty() && !psi.empty() && !k.empty() && !eps.empty(), "experiment: parameter lists must be non-empty");
  require(trials >= 1, "experiment: trials must be >= 1");
  for (Vertex v : n) require(v >= 2, "experiment: n must be >= 2");
  for (double p : psi) check_psi(p, "experiment");
  for (double e : eps) require(e > 0.0 && e < 1.0, "experiment: eps must lie in (0, 1)");
  if (name == "hop-survival") {
    for (auto kk : k) require(kk >= 3, "experiment: k must be >= 3");
  }
  if (hop_bound) require(*hop_bound >= 1, "experiment: hop bound must be >= 1");
  require(c6 > 0.0 && c7 > 0.0, "experiment: c6, c7 must be positive");
}

namespace detail {

inline std::string fmt(double x) { return format_double(x); }
template <class Int>
std::string fmt_int(Int x) {
  return format_int(x);
}

inline std::vector<TrialFailures> run_trials(const RankGraph& g, double psi, const ExperimentConfig& cfg,
                                             std::optional<std::uint32_t> hop_bound,
                                             std::optional<std::uint64_t> long_threshold) {
  std::vector<TrialFailures> out(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    out[t] = run_failure_trial(g, psi, cfg.seed, t, hop_bound, long_threshold, cfg.sampled_sources);
  });
  return out;
}

inline std::vector<double> totals(const std::vector<TrialFailures>& trials) {
  std::vector<double> v;
  for (const auto& t : trials) v.push_back(t.total);
  return v;
}

inline std::uint32_t effective_sampling(const ExperimentConfig& cfg, Vertex n) {
  return cfg.sampled_sources > 0 && cfg.sampled_sources < n ? cfg.sampled_sources : 0;
}

}  // namespace detail

// Optimal deficiency of K_n, normalized by (n / psi) ln(1 / psi).
inline ExperimentResult experiment_clique_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res{CsvTable("clique-scaling",
                                {"n", "psi", "hop_bound", "trials", "seed", "sampled_sources", "lambda_hat",
                                 "stderr", "normalizer", "ratio", "two_hop_expected", "n_over_psi2"}),
                       {}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Vertex base : cfg.n) {
    for (double psi : cfg.psi) {
      const auto n = cfg.n_over_psi ? static_cast<Vertex>(std::llround(base / psi)) : base;
      const RankGraph g = complete_graph(n);
      const auto stats = mean_stderr(detail::totals(detail::run_trials(g, psi, cfg, cfg.hop_bound, std::nullopt)));
      const double normalizer = (n / psi) * std::log(1.0 / psi);
      const double ratio = normalizer > 0.0 ? stats.mean / normalizer : std::numeric_limits<double>::quiet_NaN();
      const double two_hop = expected_two_hop_deficiency(n, psi);
      res.table.add_row({detail::fmt_int(n), detail::fmt(psi),
                         cfg.hop_bound ? detail::fmt_int(*cfg.hop_bound) : std::string("inf"),
                         detail::fmt_int(cfg.trials), detail::fmt_int(cfg.seed),
                         detail::fmt_int(detail::effective_sampling(cfg, n)), detail::fmt(stats.mean),
                         detail::fmt(stats.std_error), detail::fmt(normalizer), detail::fmt(ratio),
                         detail::fmt(two_hop), detail::fmt(n / (psi * psi))});
      if (cfg.hop_bound == 2u && std::abs(stats.mean - two_hop) > 3.0 * stats.std_error) {
        res.violations.push_back("clique-scaling n=" + detail::fmt_int(n) + " psi=" + detail::fmt(psi) +
                                 ": 2-hop mean " + detail::fmt(stats.mean) + " is more than 3 stderr from " +
                                 detail::fmt(two_hop));
      }
      if (std::isfinite(ratio) && ratio > 0.0) {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
  }
  if (!cfg.hop_bound && hi > 0.0 && hi > 4.0 * lo) {
    res.violations.push_back("clique-scaling: normalized ratios spread " + detail::fmt(hi / lo) + "x (> 4x)");
  }
  return res;
}

// Paired trials: the interval spanner and K_n are filtered by the same
// streams, so each trial's spanner survivors are the clique survivors
// restricted to the interval edges.
inline ExperimentResult experiment_spanner_vs_clique(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res{CsvTable("spanner-vs-clique",
                                {"n", "psi", "c6", "L", "spanner_edges", "clique_edges", "trials", "seed",
                                 "sampled_sources", "spanner_mean", "spanner_stderr", "clique_mean",
                                 "clique_stderr", "diff_mean", "diff_stderr", "combined_stderr", "bound",
                                 "within_bound"}),
                       {}};
  for (Vertex n : cfg.n) {
    for (double psi : cfg.psi) {
      const std::uint64_t radius = interval_radius(n, psi, cfg.c6);
      const RankGraph spanner = interval_graph(n, radius);
      const RankGraph clique = complete_graph(n);
      const auto s = detail::totals(detail::run_trials(spanner, psi, cfg, cfg.hop_bound, std::nullopt));
      const auto c = detail::totals(detail::run_trials(clique, psi, cfg, cfg.hop_bound, std::nullopt));
      std::vector<double> diff(s.size());
      for (std::size_t t = 0; t < s.size(); ++t) diff[t] = s[t] - c[t];
      const auto ss = mean_stderr(s);
      const auto cs = mean_stderr(c);
      const auto ds = mean_stderr(diff);
      const double combined = std::sqrt(ss.std_error * ss.std_error + cs.std_error * cs.std_error);
      const double bound = 3.0 * combined + 1.0;
      const bool ok = ds.mean <= bound;
      res.table.add_row({detail::fmt_int(n), detail::fmt(psi), detail::fmt(cfg.c6), detail::fmt_int(radius),
                         detail::fmt_int(spanner.edge_count()), detail::fmt_int(clique.edge_count()),
                         detail::fmt_int(cfg.trials), detail::fmt_int(cfg.seed),
                         detail::fmt_int(detail::effective_sampling(cfg, n)), detail::fmt(ss.mean),
                         detail::fmt(ss.std_error), detail::fmt(cs.mean), detail::fmt(cs.std_error),
                         detail::fmt(ds.mean), detail::fmt(ds.std_error), detail::fmt(combined), detail::fmt(bound),
                         ok ? "1" : "0"});
      if (!ok) {
        res.violations.push_back("spanner-vs-clique n=" + detail::fmt_int(n) + " psi=" + detail::fmt(psi) +
                                 ": difference " + detail::fmt(ds.mean) + " exceeds " + detail::fmt(bound));
      }
    }
  }
  return res;
}

// Path graph (every consecutive pair) against the n^{3/2}/8 floor that holds
// for graphs with at most (n/8) log_{1/(1-psi)} n edges.
inline ExperimentResult experiment_sparse_failure(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res{CsvTable("sparse-failure",
                                {"n", "psi", "radius", "edges", "avg_degree", "edge_budget", "precondition",
                                 "trials", "seed", "sampled_sources", "mean", "stderr", "threshold",
                                 "mean_ge_threshold", "positive_fraction"}),
                       {}};
  for (Vertex n : cfg.n) {
    for (double psi : cfg.psi) {
      const RankGraph g = interval_graph(n, 1);
      const auto counts = detail::totals(detail::run_trials(g, psi, cfg, cfg.hop_bound, std::nullopt));
      const auto stats = mean_stderr(counts);
      const double budget = psi < 1.0 ? (n / 8.0) * std::log(static_cast<double>(n)) / std::log(1.0 / (1.0 - psi))
                                      : std::numeric_limits<double>::infinity();
      const bool applies = psi < 1.0 && static_cast<double>(g.edge_count()) <= budget;
      const double threshold = std::pow(static_cast<double>(n), 1.5) / 8.0;
      const auto positive = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });
      const bool meets = stats.mean >= threshold;
      res.table.add_row({detail::fmt_int(n), detail::fmt(psi), "1", detail::fmt_int(g.edge_count()),
                         detail::fmt(2.0 * g.edge_count() / n), detail::fmt(budget), applies ? "1" : "0",
                         detail::fmt_int(cfg.trials), detail::fmt_int(cfg.seed),
                         detail::fmt_int(detail::effective_sampling(cfg, n)), detail::fmt(stats.mean),
                         detail::fmt(stats.std_error), detail::fmt(threshold), meets ? "1" : "0",
                         detail::fmt(static_cast<double>(positive) / static_cast<double>(cfg.trials))});
      if (applies && !meets) {
        res.violations.push_back("sparse-failure n=" + detail::fmt_int(n) + " psi=" + detail::fmt(psi) + ": mean " +
                                 detail::fmt(stats.mean) + " below " + detail::fmt(threshold));
      }
    }
  }
  return res;
}

// The construction whose hop budget is k: the 4-hop spanner for k = 4,
// otherwise the k-hop spanner.
inline RankGraph hop_budget_spanner(Vertex n, double psi, std::uint32_t k, double c7, std::uint64_t seed) {
  return k == 4 ? four_hop_spanner(n, psi, c7, seed) : khop_spanner(n, psi, k, c7, seed);
}

inline DerivedParams hop_budget_params(Vertex n, double psi, std::uint32_t k, double c7) {
  const SpannerParams p{.n = n, .psi = psi, .k = k, .c6 = kDefaultC6, .c7 = c7, .seed = 0};
  return derive_params(p, k == 4 ? RadiusRule::kFourHop : RadiusRule::kKHop);
}

// k-hop failures of the construction, split at rank distance L. The
// construction itself is built with the configured seed; trial filters use
// derive_stream(seed, t).
inline ExperimentResult experiment_hop_survival(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res{CsvTable("hop-survival",
                                {"n", "psi", "k", "construction", "c7", "nu", "M", "L", "tau", "edges", "trials",
                                 "seed", "sampled_sources", "mean_total", "stderr_total", "mean_long",
                                 "stderr_long", "long_zero_trials", "reference", "total_within_2ref_trials"}),
                       {}};
  for (Vertex n : cfg.n) {
    for (double psi : cfg.psi) {
      for (std::uint32_t k : cfg.k) {
        const DerivedParams d = hop_budget_params(n, psi, k, cfg.c7);
        const RankGraph g = hop_budget_spanner(n, psi, k, cfg.c7, cfg.seed);
        const auto trials = detail::run_trials(g, psi, cfg, k, d.radius);
        std::vector<double> total;
        std::vector<double> longs;
        for (const auto& t : trials) {
          total.push_back(t.total);
          longs.push_back(t.long_pairs);
        }
        const double reference = n / (psi * psi) + 1.0;
        const auto long_zero = std::count(longs.begin(), longs.end(), 0.0);
        const auto within = std::count_if(total.begin(), total.end(), [&](double c) { return c <= 2.0 * reference; });
        const auto ts = mean_stderr(total);
        const auto ls = mean_stderr(longs);
        res.table.add_row({detail::fmt_int(n), detail::fmt(psi), detail::fmt_int(k), k == 4 ? "four-hop" : "k-hop",
                           detail::fmt(cfg.c7), detail::fmt(d.nu), detail::fmt_int(d.block_size),
                           detail::fmt_int(d.radius), detail::fmt(d.tau), detail::fmt_int(g.edge_count()),
                           detail::fmt_int(cfg.trials), detail::fmt_int(cfg.seed),
                           detail::fmt_int(detail::effective_sampling(cfg, n)), detail::fmt(ts.mean),
                           detail::fmt(ts.std_error), detail::fmt(ls.mean), detail::fmt(ls.std_error),
                           detail::fmt_int(long_zero), detail::fmt(reference), detail::fmt_int(within)});
        const std::string where =
            "hop-survival n=" + detail::fmt_int(n) + " psi=" + detail::fmt(psi) + " k=" + detail::fmt_int(k);
        const auto need_long = static_cast<std::int64_t>(std::ceil(0.95 * cfg.trials));
        const auto need_total = static_cast<std::int64_t>(std::ceil(0.9 * cfg.trials));
        if (long_zero < need_long) {
          res.violations.push_back(where + ": long-pair failures zero in only " + detail::fmt_int(long_zero) +
                                   " trials");
        }
        if (within < need_total) {
          res.violations.push_back(where + ": total failures within 2(n/psi^2+1) in only " + detail::fmt_int(within) +
                                   " trials");
        }
      }
    }
  }
  return res;
}

// Least-squares fit of log y = c + e log(1/psi).
struct ExponentFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double rms_at_4_3 = std::numeric_limits<double>::quiet_NaN();
  double rms_at_3_2 = std::numeric_limits<double>::quiet_NaN();
};

inline double rms_at_exponent(const std::vector<double>& x, const std::vector<double>& y, double e) {
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c += y[i] - e * x[i];
  c /= static_cast<double>(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - c - e * x[i], 2);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

inline ExponentFit fit_psi_exponent(const std::vector<double>& psi, const std::vector<double>& value) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] < 1.0 && value[i] > 0.0) {
      x.push_back(std::log(1.0 / psi[i]));
      y.push_back(std::log(value[i]));
    }
  }
  ExponentFit fit;
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx > 0.0) fit.exponent = sxy / sxx;
  fit.rms_at_4_3 = rms_at_exponent(x, y, 4.0 / 3.0);
  fit.rms_at_3_2 = rms_at_exponent(x, y, 1.5);
  return fit;
}

// Edge counts of the 4-hop spanner. Per n, edges/(n ln n) is fitted against
// psi^-e; the residuals at e = 4/3 and e = 3/2 are both reported. The check
// only covers the spread of edges/(n ln n) across n at each psi.
inline ExperimentResult experiment_edge_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res{CsvTable("edge-scaling",
                                {"n", "psi", "c7", "nu", "M", "L", "tau", "seed", "edges", "interval_edges",
                                 "connector_edges", "mean_connector_degree", "edges_per_n_ln_n", "fitted_exponent",
                                 "rms_resid_4_3", "rms_resid_3_2"}),
                       {}};
  struct Row {
    Vertex n;
    double psi;
    DerivedParams d;
    std::uint64_t edges;
    std::uint64_t interval_edges;
    double per_n_ln_n;
  };
  std::vector<Row> rows;
  for (Vertex n : cfg.n) {
    for (double psi : cfg.psi) {
      const DerivedParams d = hop_budget_params(n, psi, 4, cfg.c7);
      const RankGraph g = four_hop_spanner(n, psi, cfg.c7, cfg.seed);
      const std::uint64_t interval = interval_graph(n, d.radius).edge_count();
      rows.push_back({n, psi, d, g.edge_count(), interval,
                      static_cast<double>(g.edge_count()) / (n * std::log(static_cast<double>(n)))});
    }
  }
  for (const Row& r : rows) {
    std::vector<double> ps;
    std::vector<double> vs;
    for (const Row& o : rows) {
      if (o.n == r.n) {
        ps.push_back(o.psi);
        vs.push_back(o.per_n_ln_n);
      }
    }
    const ExponentFit fit = fit_psi_exponent(ps, vs);
    const std::uint64_t connector = r.edges - r.interval_edges;
    res.table.add_row({detail::fmt_int(r.n), detail::fmt(r.psi), detail::fmt(cfg.c7), detail::fmt(r.d.nu),
                       detail::fmt_int(r.d.block_size), detail::fmt_int(r.d.radius), detail::fmt(r.d.tau),
                       detail::fmt_int(cfg.seed), detail::fmt_int(r.edges), detail::fmt_int(r.interval_edges),
                       detail::fmt_int(connector), detail::fmt(2.0 * connector / r.n), detail::fmt(r.per_n_ln_n),
                       detail::fmt(fit.exponent), detail::fmt(fit.rms_at_4_3), detail::fmt(fit.rms_at_3_2)});
  }
  for (double psi : cfg.psi) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const Row& r : rows) {
      if (r.psi != psi) continue;
      lo = std::min(lo, r.per_n_ln_n);
      hi = std::max(hi, r.per_n_ln_n);
    }
    if (hi > 2.0 * lo) {
      res.violations.push_back("edge-scaling psi=" + detail::fmt(psi) + ": edges/(n ln n) varies " +
                               detail::fmt(hi / lo) + "x across n (> 2x)");
    }
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.name == "clique-scaling") return experiment_clique_scaling(cfg);
  if (cfg.name == "spanner-vs-clique") return experiment_spanner_vs_clique(cfg);
  if (cfg.name == "sparse-failure") return experiment_sparse_failure(cfg);
  if (cfg.name == "hop-survival") return experiment_hop_survival(cfg);
  return experiment_edge_scaling(cfg);
}

}  // namespace despan

#endif  // DESPAN_EXPERIMENTS_HPP
