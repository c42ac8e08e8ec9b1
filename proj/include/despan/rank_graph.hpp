#ifndef DESPAN_RANK_GRAPH_HPP
#define DESPAN_RANK_GRAPH_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "despan/error.hpp"
#include "despan/random.hpp"

namespace despan {

// Vertices are ranks 1..n.
using Vertex = std::uint32_t;

struct Edge {
  Vertex lo = 0;
  Vertex hi = 0;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

inline constexpr std::uint64_t pair_count(std::uint64_t n) noexcept { return n * (n - 1) / 2; }

/// Undirected simple graph on ranks 1..n. Edges are kept sorted by (lo, hi),
/// which is also the order the straight-path sweeps consume them in. The
/// weight of (i, j) is |i - j| unless an explicit table is attached.
/// Immutable once built.
class RankGraph {
 public:
  RankGraph() = default;

  // Validates and canonicalizes; edges may be given with either endpoint first.
  RankGraph(Vertex n, std::vector<Edge> edges, std::vector<double> weights = {}) : n_(n) {
    require(n >= 1, "graph must have at least one vertex");
    require(weights.empty() || weights.size() == edges.size(),
            "weight table must cover exactly the edge set");
    for (auto& e : edges) {
      if (e.lo > e.hi) std::swap(e.lo, e.hi);
    }
    if (!std::is_sorted(edges.begin(), edges.end())) {
      if (weights.empty()) {
        std::sort(edges.begin(), edges.end());
      } else {
        std::vector<std::size_t> order(edges.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
        std::vector<Edge> sorted_edges(edges.size());
        std::vector<double> sorted_weights(edges.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
          sorted_edges[i] = edges[order[i]];
          sorted_weights[i] = weights[order[i]];
        }
        edges = std::move(sorted_edges);
        weights = std::move(sorted_weights);
      }
    }
    edges_ = std::move(edges);
    weights_ = std::move(weights);
    validate();
    index_rows();
  }

  // Fast path for producers that already emit canonical, sorted edges.
  static RankGraph from_sorted(Vertex n, std::vector<Edge> edges, std::vector<double> weights = {}) {
    require(n >= 1, "graph must have at least one vertex");
    require(weights.empty() || weights.size() == edges.size(),
            "weight table must cover exactly the edge set");
    RankGraph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.weights_ = std::move(weights);
    g.validate();
    g.index_rows();
    return g;
  }

  Vertex n() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  bool has_weights() const noexcept { return !weights_.empty(); }
  std::span<const double> weights() const noexcept { return weights_; }

  double weight(std::size_t edge_index) const noexcept {
    if (!weights_.empty()) return weights_[edge_index];
    const Edge e = edges_[edge_index];
    return static_cast<double>(e.hi - e.lo);
  }

  // Index range [begin, end) of edges whose lower endpoint is t.
  std::pair<std::size_t, std::size_t> row(Vertex t) const noexcept {
    return {row_start_[t], row_start_[t + 1]};
  }

  std::span<const Edge> out_edges(Vertex t) const noexcept {
    return std::span<const Edge>(edges_).subspan(row_start_[t], row_start_[t + 1] - row_start_[t]);
  }

  // Position of edge {a, b} in edges(), or edge_count() when absent.
  std::size_t find(Vertex a, Vertex b) const noexcept {
    if (a > b) std::swap(a, b);
    if (a < 1 || b > n_ || a == b) return edges_.size();
    const auto first = edges_.begin() + static_cast<std::ptrdiff_t>(row_start_[a]);
    const auto last = edges_.begin() + static_cast<std::ptrdiff_t>(row_start_[a + 1]);
    const auto it = std::lower_bound(first, last, Edge{a, b});
    if (it == last || it->hi != b) return edges_.size();
    return static_cast<std::size_t>(it - edges_.begin());
  }

  bool contains(Vertex a, Vertex b) const noexcept { return find(a, b) != edges_.size(); }

  friend bool operator==(const RankGraph& a, const RankGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.weights_ == b.weights_;
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge e = edges_[i];
      require(e.lo >= 1 && e.hi <= n_, "edge endpoint out of range [1, n]");
      require(e.lo != e.hi, "self-loop (" + std::to_string(e.lo) + "," + std::to_string(e.hi) + ")");
      require(e.lo < e.hi, "edges must be canonical (lo < hi)");
      if (i > 0) {
        require(edges_[i - 1] < e, "duplicate or unsorted edge (" + std::to_string(e.lo) + "," +
                                       std::to_string(e.hi) + ")");
      }
      if (!weights_.empty()) require(weights_[i] > 0.0, "edge weights must be positive");
    }
  }

  void index_rows() {
    row_start_.assign(static_cast<std::size_t>(n_) + 2, 0);
    for (const Edge& e : edges_) ++row_start_[e.lo + 1];
    for (std::size_t v = 1; v < row_start_.size(); ++v) row_start_[v] += row_start_[v - 1];
  }

  Vertex n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::size_t> row_start_;
};

inline RankGraph interval_graph(Vertex n, std::uint64_t radius) {
  require(n >= 1, "interval_graph: n must be >= 1");
  const std::uint64_t r = std::min<std::uint64_t>(radius, n - 1);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(r * n - r * (r + 1) / 2));
  for (Vertex i = 1; i <= n; ++i) {
    const Vertex last = static_cast<Vertex>(std::min<std::uint64_t>(n, i + r));
    for (Vertex j = i + 1; j <= last; ++j) edges.push_back({i, j});
  }
  return RankGraph::from_sorted(n, std::move(edges));
}

inline RankGraph complete_graph(Vertex n) {
  require(n >= 1, "complete_graph: n must be >= 1");
  return interval_graph(n, n - 1);
}

// Keeps each edge independently with probability psi. Edge {i, j} survives
// iff stream.bernoulli_at(pair_counter(i, j), psi), so two graphs filtered
// with the same stream agree on every edge they share.
inline RankGraph filter_edges(const RankGraph& g, double psi, const RandomStream& stream) {
  require(psi >= 0.0 && psi <= 1.0, "filter_edges: psi must lie in [0, 1]");
  std::vector<Edge> kept;
  std::vector<double> kept_weights;
  kept.reserve(static_cast<std::size_t>(static_cast<double>(g.edge_count()) * psi * 1.05) + 16);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!stream.bernoulli_at(pair_counter(edges[i].lo, edges[i].hi), psi)) continue;
    kept.push_back(edges[i]);
    if (g.has_weights()) kept_weights.push_back(g.weights()[i]);
  }
  return RankGraph::from_sorted(g.n(), std::move(kept), std::move(kept_weights));
}

// Set union. A weighted and an unweighted graph may be combined: the
// unweighted side contributes its rank-metric weights.
inline RankGraph graph_union(const RankGraph& a, const RankGraph& b) {
  require(a.n() == b.n(), "graph_union: vertex counts differ");
  const bool weighted = a.has_weights() || b.has_weights();
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(a.edge_count() + b.edge_count());
  const auto ea = a.edges();
  const auto eb = b.edges();
  std::size_t i = 0;
  std::size_t j = 0;
  auto take = [&](const RankGraph& g, std::size_t k) {
    edges.push_back(g.edges()[k]);
    if (weighted) weights.push_back(g.weight(k));
  };
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i] < eb[j])) {
      take(a, i++);
    } else if (i == ea.size() || eb[j] < ea[i]) {
      take(b, j++);
    } else {
      if (a.has_weights() && b.has_weights()) {
        require(a.weight(i) == b.weight(j), "graph_union: weights disagree on a shared edge");
      }
      if (a.has_weights() || !b.has_weights()) {
        take(a, i);
      } else {
        take(b, j);
      }
      ++i;
      ++j;
    }
  }
  return RankGraph::from_sorted(a.n(), std::move(edges), std::move(weights));
}

}  // namespace despan

#endif  // DESPAN_RANK_GRAPH_HPP
