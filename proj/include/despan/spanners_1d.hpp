#ifndef DESPAN_SPANNERS_1D_HPP
#define DESPAN_SPANNERS_1D_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "despan/error.hpp"
#include "despan/random.hpp"
#include "despan/rank_graph.hpp"

// One-dimensional dependable spanners on ranks 1..n. All logarithms in the
// parameter formulas are natural logarithms.
namespace despan {

inline constexpr double kDefaultC6 = 4.0;
inline constexpr double kDefaultC7 = 4.0;

// Survival probabilities are accepted in (0, 1]; psi = 1 is the failure-free
// limit and is used to check the unfiltered guarantees.
inline void check_psi(double psi, const char* who) {
  require(psi > 0.0 && psi <= 1.0, std::string(who) + ": psi must lie in (0, 1]");
}

// The constructions assume psi >= 1/n; below that they still build.
inline bool below_psi_floor(Vertex n, double psi) { return psi * static_cast<double>(n) < 1.0; }

inline std::uint64_t interval_radius(Vertex n, double psi, double c6 = kDefaultC6) {
  require(n >= 1, "interval_radius: n must be >= 1");
  check_psi(psi, "interval_radius");
  require(c6 > 0.0, "interval_radius: c6 must be positive");
  const double raw = std::ceil((c6 / psi) * std::log(static_cast<double>(n)));
  return std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(raw));
}

// Everything within rank distance ceil((c6/psi) ln n) is connected.
inline RankGraph dependable_interval_spanner(Vertex n, double psi, double c6 = kDefaultC6) {
  return interval_graph(n, interval_radius(n, psi, c6));
}

// Edges on [a, b]: the median floor((a+b)/2) joins every other vertex of the
// range, then both sides recurse. Every pair gets a straight path of at most
// two hops.
inline std::vector<Edge> two_hop_hierarchy(Vertex a, Vertex b) {
  require(a >= 1 && a <= b, "two_hop_hierarchy: need 1 <= a <= b");
  std::vector<Edge> edges;
  std::vector<std::pair<Vertex, Vertex>> pending{{a, b}};
  while (!pending.empty()) {
    const auto [lo, hi] = pending.back();
    pending.pop_back();
    if (lo >= hi) continue;
    const Vertex m = static_cast<Vertex>((static_cast<std::uint64_t>(lo) + hi) / 2);
    for (Vertex v = lo; v <= hi; ++v) {
      if (v < m) edges.push_back({v, m});
      if (v > m) edges.push_back({m, v});
    }
    if (m > lo) pending.push_back({lo, m - 1});
    if (m < hi) pending.push_back({m + 1, hi});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

struct Block {
  Vertex first = 0;
  Vertex last = 0;

  Vertex size() const noexcept { return last - first + 1; }
  friend constexpr bool operator==(const Block&, const Block&) = default;
};

struct BlockPartition {
  std::vector<Block> blocks;

  std::size_t size() const noexcept { return blocks.size(); }
  const Block& operator[](std::size_t i) const { return blocks[i]; }
};

// floor(n/M) blocks of size M; a remainder is merged into the last block.
// M > n gives a single block.
inline BlockPartition block_partition(Vertex n, std::uint64_t block_size) {
  require(n >= 1, "block_partition: n must be >= 1");
  require(block_size >= 1, "block_partition: block size must be >= 1");
  BlockPartition p;
  const std::uint64_t count = std::max<std::uint64_t>(1, n / block_size);
  p.blocks.reserve(count);
  for (std::uint64_t b = 0; b < count; ++b) {
    const auto first = static_cast<Vertex>(b * block_size + 1);
    const auto last = b + 1 == count ? n : static_cast<Vertex>((b + 1) * block_size);
    p.blocks.push_back({first, last});
  }
  return p;
}

// Random bipartite graph between disjoint blocks: each cross pair {x, y} is
// kept iff stream.bernoulli_at(pair_counter(x, y), tau). Output is sorted.
inline std::vector<Edge> bipartite_connector(Block x, Block y, double tau, const RandomStream& stream) {
  require(x.first <= x.last && y.first <= y.last, "bipartite_connector: empty block");
  require(x.last < y.first || y.last < x.first, "bipartite_connector: blocks overlap");
  require(tau >= 0.0 && tau <= 1.0, "bipartite_connector: tau must lie in [0, 1]");
  if (y.last < x.first) std::swap(x, y);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(tau * x.size() * y.size() * 1.1) + 8);
  for (Vertex u = x.first; u <= x.last; ++u) {
    for (Vertex v = y.first; v <= y.last; ++v) {
      if (stream.bernoulli_at(pair_counter(u, v), tau)) edges.push_back({u, v});
    }
  }
  return edges;
}

// Number of distinct far-side endpoints adjacent to some vertex of S, where S
// holds lower endpoints (sorted). Used to measure expansion of a connector.
inline std::uint64_t connector_reach(std::span<const Edge> edges, std::span<const Vertex> s) {
  std::vector<Vertex> hit;
  for (const Edge& e : edges) {
    if (std::binary_search(s.begin(), s.end(), e.lo)) hit.push_back(e.hi);
  }
  std::sort(hit.begin(), hit.end());
  return static_cast<std::uint64_t>(std::unique(hit.begin(), hit.end()) - hit.begin());
}

enum class RadiusRule {
  kFourHop,  // L = 6M
  kKHop,     // L = (k + 4) M
};

struct SpannerParams {
  Vertex n = 0;
  double psi = 0.5;
  std::uint32_t k = 4;
  double c6 = kDefaultC6;
  double c7 = kDefaultC7;
  std::uint64_t seed = 0;

  void validate() const {
    require(n >= 2, "spanner: n must be >= 2");
    check_psi(psi, "spanner");
    require(k >= 3, "spanner: hop budget k must be >= 3");
    require(c6 > 0.0 && c7 > 0.0, "spanner: constants c6, c7 must be positive");
  }
};

/// Parameters shared by the block constructions:
///   nu  = psi^(-1/(k-1))                 (k = 4: psi^(-1/3))
///   M   = min(n, ceil((c7 nu / psi) ln n))
///   L   = min(n - 1, 6M)  or  min(n - 1, (k+4) M)
///   tau = min(1, c7^2 nu / (psi M))
/// When M reaches n the partition is a single block and the interval graph
/// alone is K_n; then L = n - 1 < M.
struct DerivedParams {
  double nu = 1.0;
  std::uint64_t block_size = 1;  // M
  std::uint64_t radius = 0;      // L
  double tau = 1.0;
};

inline DerivedParams derive_params(const SpannerParams& p, RadiusRule rule) {
  p.validate();
  DerivedParams d;
  d.nu = std::pow(p.psi, -1.0 / static_cast<double>(p.k - 1));
  const double raw_m = std::ceil((p.c7 * d.nu / p.psi) * std::log(static_cast<double>(p.n)));
  d.block_size = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(raw_m), 1, p.n);
  const std::uint64_t factor = rule == RadiusRule::kFourHop ? 6 : std::uint64_t{p.k} + 4;
  d.radius = std::min<std::uint64_t>(p.n - 1, factor * d.block_size);
  d.tau = std::min(1.0, p.c7 * p.c7 * d.nu / (p.psi * static_cast<double>(d.block_size)));
  return d;
}

namespace detail {

// Interval edges plus `extra` (sorted); extra edges already inside the
// radius are dropped as duplicates.
inline RankGraph interval_plus(Vertex n, std::uint64_t radius, std::vector<Edge> extra) {
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  std::erase_if(extra, [&](const Edge& e) { return e.hi - e.lo <= radius; });
  const RankGraph base = interval_graph(n, radius);
  std::vector<Edge> merged;
  merged.reserve(base.edge_count() + extra.size());
  std::merge(base.edges().begin(), base.edges().end(), extra.begin(), extra.end(),
             std::back_inserter(merged));
  return RankGraph::from_sorted(n, std::move(merged));
}

// Block-hierarchy edges as pairs of 0-based block indices.
inline std::vector<std::pair<std::size_t, std::size_t>> block_hierarchy(const BlockPartition& blocks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (blocks.size() < 2) return out;
  for (const Edge& e : two_hop_hierarchy(1, static_cast<Vertex>(blocks.size()))) {
    out.emplace_back(e.lo - 1, e.hi - 1);
  }
  return out;
}

inline RankGraph connector_spanner(const SpannerParams& p, const DerivedParams& d) {
  const BlockPartition blocks = block_partition(p.n, d.block_size);
  std::vector<Edge> extra;
  for (const auto& [bi, bj] : block_hierarchy(blocks)) {
    // One stream per hierarchy edge, keyed by the 1-based block pair.
    const RandomStream stream =
        derive_stream(p.seed, pair_counter(static_cast<Vertex>(bi + 1), static_cast<Vertex>(bj + 1)));
    std::vector<Edge> part = bipartite_connector(blocks[bi], blocks[bj], d.tau, stream);
    extra.insert(extra.end(), part.begin(), part.end());
  }
  return interval_plus(p.n, d.radius, std::move(extra));
}

}  // namespace detail

// Reference construction with full bicliques on the block hierarchy.
inline RankGraph biclique_block_spanner(Vertex n, double psi, double c7 = kDefaultC7) {
  const SpannerParams p{.n = n, .psi = psi, .k = 4, .c6 = kDefaultC6, .c7 = c7, .seed = 0};
  const DerivedParams d = derive_params(p, RadiusRule::kFourHop);
  const BlockPartition blocks = block_partition(n, d.block_size);
  std::vector<Edge> extra;
  for (const auto& [bi, bj] : detail::block_hierarchy(blocks)) {
    const Block x = blocks[bi];
    const Block y = blocks[bj];
    for (Vertex u = x.first; u <= x.last; ++u) {
      // Pairs within the radius are already interval edges.
      const std::uint64_t from = std::max<std::uint64_t>(y.first, u + d.radius + 1);
      for (std::uint64_t v = from; v <= y.last; ++v) extra.push_back({u, static_cast<Vertex>(v)});
    }
  }
  return detail::interval_plus(n, d.radius, std::move(extra));
}

inline RankGraph four_hop_spanner(Vertex n, double psi, double c7 = kDefaultC7, std::uint64_t seed = 0) {
  const SpannerParams p{.n = n, .psi = psi, .k = 4, .c6 = kDefaultC6, .c7 = c7, .seed = seed};
  return detail::connector_spanner(p, derive_params(p, RadiusRule::kFourHop));
}

inline RankGraph khop_spanner(Vertex n, double psi, std::uint32_t k, double c7 = kDefaultC7,
                              std::uint64_t seed = 0) {
  require(k >= 3, "khop_spanner: k must be >= 3");
  const SpannerParams p{.n = n, .psi = psi, .k = k, .c6 = kDefaultC6, .c7 = c7, .seed = seed};
  return detail::connector_spanner(p, derive_params(p, RadiusRule::kKHop));
}

}  // namespace despan

#endif  // DESPAN_SPANNERS_1D_HPP
