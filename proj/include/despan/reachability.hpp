#ifndef DESPAN_REACHABILITY_HPP
#define DESPAN_REACHABILITY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "despan/error.hpp"
#include "despan/parallel.hpp"
#include "despan/random.hpp"
#include "despan/rank_graph.hpp"

namespace despan {

inline constexpr std::uint32_t kInfiniteHops = std::numeric_limits<std::uint32_t>::max();

// Values for targets j in (source, n].
template <class T>
class SourceRow {
 public:
  SourceRow(Vertex source, Vertex n, T fill)
      : source_(source), values_(static_cast<std::size_t>(n - source), fill) {}

  Vertex source() const noexcept { return source_; }
  Vertex last() const noexcept { return source_ + static_cast<Vertex>(values_.size()); }
  const T& operator[](Vertex j) const { return values_.at(j - source_ - 1); }
  T& operator[](Vertex j) { return values_.at(j - source_ - 1); }

 private:
  Vertex source_;
  std::vector<T> values_;
};

using ReachRow = SourceRow<std::uint8_t>;
using HopRow = SourceRow<std::uint32_t>;

inline void check_vertex(const RankGraph& g, Vertex v) {
  require(v >= 1 && v <= g.n(), "vertex " + std::to_string(v) + " out of range [1, " +
                                    std::to_string(g.n()) + "]");
}

// Targets reachable from i by a strictly increasing path. One forward sweep.
inline ReachRow straight_reachable(const RankGraph& g, Vertex i) {
  check_vertex(g, i);
  ReachRow row(i, g.n(), 0);
  auto reached = [&](Vertex t) { return t == i || row[t] != 0; };
  for (Vertex t = i; t < g.n(); ++t) {
    if (!reached(t)) continue;
    for (const Edge& e : g.out_edges(t)) row[e.hi] = 1;
  }
  return row;
}

// Minimum number of hops on a straight path from i; kInfiniteHops if none.
inline HopRow straight_hops(const RankGraph& g, Vertex i) {
  check_vertex(g, i);
  HopRow row(i, g.n(), kInfiniteHops);
  auto hops = [&](Vertex t) { return t == i ? 0u : row[t]; };
  for (Vertex t = i; t < g.n(); ++t) {
    const std::uint32_t h = hops(t);
    if (h == kInfiniteHops) continue;
    for (const Edge& e : g.out_edges(t)) row[e.hi] = std::min(row[e.hi], h + 1);
  }
  return row;
}

struct PairFailures {
  std::uint64_t total = 0;       // pairs i < j without a qualifying straight path
  std::uint64_t long_pairs = 0;  // the subset with j - i > long_threshold
};

struct FailureQuery {
  std::optional<std::uint32_t> hop_bound;          // empty: unbounded straight paths
  std::optional<std::uint64_t> long_threshold;     // empty: long_pairs stays 0
  std::optional<std::vector<Vertex>> sources;      // empty: every vertex is a source
};

namespace detail {

inline std::uint64_t popcount_prefix(const std::uint64_t* row, std::uint64_t bits) {
  std::uint64_t count = 0;
  const std::uint64_t full = bits / 64;
  for (std::uint64_t w = 0; w < full; ++w) count += static_cast<std::uint64_t>(std::popcount(row[w]));
  if (const std::uint64_t rest = bits % 64; rest != 0) {
    count += static_cast<std::uint64_t>(std::popcount(row[full] & ((std::uint64_t{1} << rest) - 1)));
  }
  return count;
}

// Transposed sweep: row j holds one bit per source, set when that source
// reaches j. Pushing edges (t, j) in increasing t finalizes row t before it
// is read. Cost O(|E| * |sources| / 64) words.
inline PairFailures count_source_block(const RankGraph& g, std::span<const Vertex> sources,
                                       std::optional<std::uint32_t> hop_bound,
                                       std::uint64_t long_threshold) {
  const std::size_t n = g.n();
  const std::size_t words = (sources.size() + 63) / 64;
  std::vector<std::uint64_t> cur((n + 1) * words, 0);
  std::vector<std::uint8_t> live(n + 1, 0);
  for (std::size_t b = 0; b < sources.size(); ++b) {
    cur[sources[b] * words + b / 64] |= std::uint64_t{1} << (b % 64);
    live[sources[b]] = 1;
  }
  const Vertex first = sources.front();
  const auto edges = g.edges();
  const std::size_t begin = g.row(first).first;

  if (!hop_bound) {
    for (std::size_t k = begin; k < edges.size(); ++k) {
      const Vertex t = edges[k].lo;
      if (!live[t]) continue;
      const Vertex j = edges[k].hi;
      const std::uint64_t* src = &cur[t * words];
      std::uint64_t* dst = &cur[j * words];
      for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
      live[j] = 1;
    }
  } else {
    std::vector<std::uint64_t> next(cur.size());
    std::vector<std::uint8_t> next_live(n + 1);
    for (std::uint32_t round = 0; round < *hop_bound; ++round) {
      next = cur;
      next_live = live;
      bool changed = false;
      for (std::size_t k = begin; k < edges.size(); ++k) {
        const Vertex t = edges[k].lo;
        if (!live[t]) continue;
        const Vertex j = edges[k].hi;
        const std::uint64_t* src = &cur[t * words];
        std::uint64_t* dst = &next[j * words];
        for (std::size_t w = 0; w < words; ++w) {
          const std::uint64_t merged = dst[w] | src[w];
          changed |= merged != dst[w];
          dst[w] = merged;
        }
        next_live[j] = 1;
      }
      cur.swap(next);
      live.swap(next_live);
      if (!changed) break;
    }
  }

  PairFailures out;
  std::size_t before = 0;       // sources s < j
  std::size_t long_before = 0;  // sources s with j - s > long_threshold
  for (Vertex j = first + 1; j <= n; ++j) {
    while (before < sources.size() && sources[before] < j) ++before;
    while (long_before < sources.size() &&
           static_cast<std::uint64_t>(sources[long_before]) + long_threshold < j) {
      ++long_before;
    }
    const std::uint64_t* row = &cur[j * words];
    out.total += before - popcount_prefix(row, before);
    out.long_pairs += long_before - popcount_prefix(row, long_before);
  }
  return out;
}

}  // namespace detail

// Exact straight-path failure counts over the selected sources.
inline PairFailures count_pair_failures(const RankGraph& g, const FailureQuery& query = {}) {
  if (query.hop_bound) require(*query.hop_bound >= 1, "hop bound must be >= 1");
  std::optional<std::uint32_t> hops = query.hop_bound;
  if (hops && *hops >= g.n() - 1) hops.reset();  // every straight path has <= n-1 hops
  const std::uint64_t long_threshold =
      query.long_threshold.value_or(std::numeric_limits<std::uint32_t>::max());

  std::vector<Vertex> all;
  std::span<const Vertex> sources;
  if (query.sources) {
    sources = *query.sources;
    require(std::is_sorted(sources.begin(), sources.end()) &&
                std::adjacent_find(sources.begin(), sources.end()) == sources.end(),
            "sources must be strictly increasing");
    for (Vertex s : sources) check_vertex(g, s);
  } else {
    all.resize(g.n());
    for (Vertex v = 1; v <= g.n(); ++v) all[v - 1] = v;
    sources = all;
  }

  constexpr std::size_t kBlock = 4096;
  PairFailures out;
  for (std::size_t at = 0; at < sources.size(); at += kBlock) {
    const auto block = sources.subspan(at, std::min(kBlock, sources.size() - at));
    const PairFailures part = detail::count_source_block(g, block, hops, long_threshold);
    out.total += part.total;
    out.long_pairs += part.long_pairs;
  }
  return out;
}

inline std::uint64_t deficiency(const RankGraph& g) { return count_pair_failures(g).total; }

inline std::uint64_t khop_deficiency(const RankGraph& g, std::uint32_t k) {
  require(k >= 1, "khop_deficiency: k must be >= 1");
  return count_pair_failures(g, {.hop_bound = k, .long_threshold = {}, .sources = {}}).total;
}

/// Probability that ranks at distance delta have neither the direct edge nor
/// any of the delta-1 two-hop straight paths after filtering K_n at psi. The
/// direct edge and the two-hop paths use pairwise disjoint edges, so this is
/// exact: (1 - psi) * (1 - psi^2)^(delta - 1).
inline double no_two_hop_probability(std::uint64_t delta, double psi) {
  require(delta >= 1, "no_two_hop_probability: delta must be >= 1");
  require(psi >= 0.0 && psi <= 1.0, "no_two_hop_probability: psi must lie in [0, 1]");
  return (1.0 - psi) * std::pow(1.0 - psi * psi, static_cast<double>(delta - 1));
}

// Expected number of 2-hop failures in K_n filtered at psi.
inline double expected_two_hop_deficiency(std::uint64_t n, double psi) {
  require(n >= 2, "expected_two_hop_deficiency: n must be >= 2");
  require(psi > 0.0 && psi <= 1.0, "expected_two_hop_deficiency: psi must lie in (0, 1]");
  double sum = 0.0;
  for (std::uint64_t delta = 1; delta < n; ++delta) {
    sum += static_cast<double>(n - delta) * no_two_hop_probability(delta, psi);
  }
  return sum;
}

struct DeficiencyReport {
  Vertex n = 0;
  double psi = 0.0;
  std::optional<std::uint32_t> hop_bound;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint32_t sampled_sources = 0;  // 0: exact over all sources
  double mean_failed_pairs = 0.0;
  double std_error = 0.0;
  std::vector<double> per_trial_counts;
};

// Sample mean and standard error (sample std / sqrt(count)).
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double variance = ss / static_cast<double>(values.size() - 1);
  out.std_error = std::sqrt(variance / static_cast<double>(values.size()));
  return out;
}

struct MonteCarloOptions {
  std::optional<std::uint32_t> hop_bound;
  std::uint32_t sampled_sources = 0;  // > 0 and < n: estimate from that many random sources
  unsigned threads = 0;
};

// Sorted sample of `count` distinct vertices from 1..n (Floyd's algorithm).
inline std::vector<Vertex> sample_sources(Vertex n, std::uint32_t count, RandomStream& stream) {
  require(count >= 1 && count <= n, "source sample size must lie in [1, n]");
  std::vector<Vertex> picked;
  picked.reserve(count);
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(n) + 1, 0);
  for (Vertex j = n - count + 1; j <= n; ++j) {
    const Vertex t = static_cast<Vertex>(1 + stream.next_below(j));
    const Vertex v = taken[t] ? j : t;
    taken[v] = 1;
    picked.push_back(v);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

// Failures of one trial: filter with derive_stream(master, trial), then count.
// With source sampling the count is scaled by n / sources.
struct TrialFailures {
  double total = 0.0;
  double long_pairs = 0.0;
};

inline TrialFailures run_failure_trial(const RankGraph& g, double psi, std::uint64_t master,
                                       std::uint64_t trial, std::optional<std::uint32_t> hop_bound,
                                       std::optional<std::uint64_t> long_threshold,
                                       std::uint32_t sampled_sources) {
  RandomStream stream = derive_stream(master, trial);
  const RankGraph filtered = filter_edges(g, psi, stream);
  FailureQuery query{.hop_bound = hop_bound, .long_threshold = long_threshold, .sources = {}};
  double scale = 1.0;
  if (sampled_sources > 0 && sampled_sources < g.n()) {
    query.sources = sample_sources(g.n(), sampled_sources, stream);
    scale = static_cast<double>(g.n()) / static_cast<double>(sampled_sources);
  }
  const PairFailures f = count_pair_failures(filtered, query);
  return {static_cast<double>(f.total) * scale, static_cast<double>(f.long_pairs) * scale};
}

inline DeficiencyReport monte_carlo_deficiency(const RankGraph& g, double psi, std::uint64_t trials,
                                               std::uint64_t master, const MonteCarloOptions& options = {}) {
  require(trials >= 1, "monte_carlo_deficiency: trials must be >= 1");
  require(psi >= 0.0 && psi <= 1.0, "monte_carlo_deficiency: psi must lie in [0, 1]");
  if (options.hop_bound) require(*options.hop_bound >= 1, "hop bound must be >= 1");

  DeficiencyReport report;
  report.n = g.n();
  report.psi = psi;
  report.hop_bound = options.hop_bound;
  report.trials = trials;
  report.seed = master;
  report.sampled_sources =
      (options.sampled_sources > 0 && options.sampled_sources < g.n()) ? options.sampled_sources : 0;
  report.per_trial_counts.assign(trials, 0.0);
  parallel_for(trials, options.threads, [&](std::size_t t) {
    report.per_trial_counts[t] =
        run_failure_trial(g, psi, master, t, options.hop_bound, std::nullopt, options.sampled_sources).total;
  });
  const MeanStderr stats = mean_stderr(report.per_trial_counts);
  report.mean_failed_pairs = stats.mean;
  report.std_error = stats.std_error;
  return report;
}

}  // namespace despan

#endif  // DESPAN_REACHABILITY_HPP
