#ifndef DESPAN_EUCLID_HPP
#define DESPAN_EUCLID_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "despan/error.hpp"
#include "despan/lso.hpp"
#include "despan/parallel.hpp"
#include "despan/points.hpp"
#include "despan/random.hpp"
#include "despan/rank_graph.hpp"
#include "despan/spanners_1d.hpp"

namespace despan {

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

// Slack for floating-point rounding when testing length <= (1 + eps) |uv|.
inline constexpr double kStretchSlack = 1e-12;

/// RankGraph over point indices 1..n with Euclidean edge weights, plus an
/// adjacency index for path searches.
class GeometricGraph {
 public:
  struct Arc {
    Vertex to;
    double weight;
  };

  GeometricGraph() = default;

  explicit GeometricGraph(RankGraph graph) : graph_(std::move(graph)) {
    require(graph_.has_weights() || graph_.edge_count() == 0,
            "geometric graph needs an explicit weight table");
    offsets_.assign(static_cast<std::size_t>(graph_.n()) + 2, 0);
    for (const Edge& e : graph_.edges()) {
      ++offsets_[e.lo + 1];
      ++offsets_[e.hi + 1];
    }
    for (std::size_t v = 1; v < offsets_.size(); ++v) offsets_[v] += offsets_[v - 1];
    arcs_.resize(2 * graph_.edge_count());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < graph_.edge_count(); ++i) {
      const Edge e = graph_.edges()[i];
      const double w = graph_.weight(i);
      arcs_[fill[e.lo]++] = {e.hi, w};
      arcs_[fill[e.hi]++] = {e.lo, w};
    }
  }

  // Complete graph on P with Euclidean weights.
  static GeometricGraph complete(const PointSet& points) {
    std::vector<Edge> edges;
    std::vector<double> weights;
    const auto n = static_cast<Vertex>(points.size());
    for (Vertex a = 1; a <= n; ++a) {
      for (Vertex b = a + 1; b <= n; ++b) {
        edges.push_back({a, b});
        weights.push_back(points.distance(a - 1, b - 1));
      }
    }
    return GeometricGraph(RankGraph::from_sorted(n, std::move(edges), std::move(weights)));
  }

  const RankGraph& graph() const noexcept { return graph_; }
  Vertex n() const noexcept { return graph_.n(); }
  std::size_t edge_count() const noexcept { return graph_.edge_count(); }

  std::span<const Arc> arcs(Vertex v) const noexcept {
    return std::span<const Arc>(arcs_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  friend bool operator==(const GeometricGraph& a, const GeometricGraph& b) { return a.graph_ == b.graph_; }

 private:
  RankGraph graph_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

inline GeometricGraph filter_edges(const GeometricGraph& g, double psi, const RandomStream& stream) {
  return GeometricGraph(filter_edges(g.graph(), psi, stream));
}

/// Hop-bounded single-source shortest paths: k synchronous rounds of edge
/// relaxation, so distance(v) is the minimum length over paths with at most
/// k edges. Only vertices improved in the previous round are expanded.
class BoundedHopSearch {
 public:
  BoundedHopSearch(const GeometricGraph& g, Vertex source, std::uint32_t hop_bound, bool keep_paths = false)
      : source_(source), hop_bound_(hop_bound) {
    require(hop_bound >= 1, "bounded_hop_distance: hop bound must be >= 1");
    require(source >= 1 && source <= g.n(), "bounded_hop_distance: unknown vertex");
    const std::size_t size = static_cast<std::size_t>(g.n()) + 1;
    dist_.assign(size, kInfiniteLength);
    dist_[source] = 0.0;
    if (keep_paths) pred_.assign(static_cast<std::size_t>(hop_bound) * size, 0);

    std::vector<double> prev;
    std::vector<Vertex> frontier{source};
    std::vector<Vertex> improved;
    std::vector<std::uint8_t> marked(size, 0);
    for (std::uint32_t round = 0; round < hop_bound && !frontier.empty(); ++round) {
      prev = dist_;
      improved.clear();
      for (Vertex a : frontier) {
        for (const auto& arc : g.arcs(a)) {
          const double candidate = prev[a] + arc.weight;
          if (candidate < dist_[arc.to]) {
            dist_[arc.to] = candidate;
            if (keep_paths) pred_[round * size + arc.to] = a;
            if (!marked[arc.to]) {
              marked[arc.to] = 1;
              improved.push_back(arc.to);
            }
          }
        }
      }
      for (Vertex v : improved) marked[v] = 0;
      std::sort(improved.begin(), improved.end());
      frontier.swap(improved);
    }
  }

  double distance(Vertex v) const { return dist_.at(v); }
  std::span<const double> distances() const noexcept { return dist_; }

  // Vertices of a path from the source to v with at most hop_bound edges
  // whose length is distance(v); empty when v is unreachable. Requires
  // keep_paths.
  std::vector<Vertex> path(Vertex v) const {
    require(!pred_.empty(), "BoundedHopSearch: paths were not kept");
    if (dist_.at(v) == kInfiniteLength) return {};
    const std::size_t size = dist_.size();
    std::vector<Vertex> out{v};
    Vertex at = v;
    for (std::size_t round = hop_bound_; round-- > 0;) {
      const Vertex p = pred_[round * size + at];
      if (p == 0) continue;
      at = p;
      out.push_back(at);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  Vertex source_;
  std::uint32_t hop_bound_;
  std::vector<double> dist_;
  std::vector<Vertex> pred_;  // pred_[round * (n+1) + v]; 0 when v did not improve that round
};

inline double bounded_hop_distance(const GeometricGraph& g, Vertex u, Vertex v, std::uint32_t hop_bound) {
  require(v >= 1 && v <= g.n(), "bounded_hop_distance: unknown vertex");
  return BoundedHopSearch(g, u, hop_bound).distance(v);
}

inline bool within_stretch(double length, double euclidean, double eps) {
  return length <= (1.0 + eps) * euclidean * (1.0 + kStretchSlack);
}

// Unordered pairs whose best <= k-hop path is longer than (1 + eps) |uv|.
inline std::uint64_t count_stretch_failures(const GeometricGraph& g, const PointSet& points, double eps,
                                            std::uint32_t hop_bound, unsigned threads = 0) {
  require(points.size() == g.n(), "count_stretch_failures: graph and point set sizes differ");
  require(hop_bound >= 1, "count_stretch_failures: hop bound must be >= 1");
  const Vertex n = g.n();
  std::vector<std::uint64_t> per_source(n, 0);
  parallel_for(n, threads, [&](std::size_t s) {
    const auto u = static_cast<Vertex>(s + 1);
    const BoundedHopSearch search(g, u, hop_bound);
    for (Vertex v = u + 1; v <= n; ++v) {
      if (!within_stretch(search.distance(v), points.distance(u - 1, v - 1), eps)) ++per_source[s];
    }
  });
  return std::accumulate(per_source.begin(), per_source.end(), std::uint64_t{0});
}

struct StretchAudit {
  std::uint64_t pairs = 0;
  std::uint64_t failures = 0;
  std::uint64_t unsound = 0;  // non-failed pairs whose extracted path does not check out
  double worst_ratio = 0.0;   // max extracted length / |uv| over non-failed pairs
};

// count_stretch_failures plus, for every non-failed pair, extraction of an
// explicit <= k-edge path that is re-summed edge by edge and checked against
// the reported distance and against (1 + eps) |uv| (relative tolerance 1e-9).
inline StretchAudit audit_stretch(const GeometricGraph& g, const PointSet& points, double eps,
                                  std::uint32_t hop_bound, unsigned threads = 0) {
  require(points.size() == g.n(), "audit_stretch: graph and point set sizes differ");
  constexpr double kTolerance = 1e-9;
  const Vertex n = g.n();
  std::vector<StretchAudit> per_source(n);
  parallel_for(n, threads, [&](std::size_t s) {
    const auto u = static_cast<Vertex>(s + 1);
    const BoundedHopSearch search(g, u, hop_bound, true);
    StretchAudit& out = per_source[s];
    for (Vertex v = u + 1; v <= n; ++v) {
      ++out.pairs;
      const double euclidean = points.distance(u - 1, v - 1);
      const double reported = search.distance(v);
      if (!within_stretch(reported, euclidean, eps)) {
        ++out.failures;
        continue;
      }
      const std::vector<Vertex> path = search.path(v);
      bool ok = path.size() >= 2 && path.size() - 1 <= hop_bound && path.front() == u && path.back() == v;
      double length = 0.0;
      for (std::size_t i = 0; ok && i + 1 < path.size(); ++i) {
        const std::size_t e = g.graph().find(path[i], path[i + 1]);
        ok = e < g.edge_count();
        if (ok) length += g.graph().weight(e);
      }
      ok = ok && std::abs(length - reported) <= kTolerance * reported &&
           length <= (1.0 + eps) * euclidean * (1.0 + kTolerance);
      if (!ok) ++out.unsound;
      out.worst_ratio = std::max(out.worst_ratio, length / euclidean);
    }
  });
  StretchAudit total;
  for (const auto& a : per_source) {
    total.pairs += a.pairs;
    total.failures += a.failures;
    total.unsound += a.unsound;
    total.worst_ratio = std::max(total.worst_ratio, a.worst_ratio);
  }
  return total;
}

enum class EuclidMode { kFourHop, kLogHop };

inline const char* to_string(EuclidMode mode) { return mode == EuclidMode::kFourHop ? "four-hop" : "log-hop"; }

struct EuclidOptions {
  double eps = 0.25;
  double psi = 0.5;
  double c7 = kDefaultC7;
  EuclidMode mode = EuclidMode::kFourHop;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// Hop budget of the per-ordering 1-D construction: 4, or
// max(3, ceil(log2(1/psi))) in log-hop mode.
inline std::uint32_t euclid_hop_budget(EuclidMode mode, double psi) {
  if (mode == EuclidMode::kFourHop) return 4;
  return std::max<std::uint32_t>(3, static_cast<std::uint32_t>(std::ceil(std::log2(1.0 / psi) - 1e-12)));
}

inline double euclid_lso_eps(EuclidMode mode, double eps, std::uint32_t hop_budget) {
  return mode == EuclidMode::kFourHop ? eps / 8.0 : eps / (2.0 * hop_budget);
}

inline constexpr std::uint64_t kOrderingSeedTag = std::uint64_t{1} << 63;

inline std::uint64_t ordering_seed(std::uint64_t seed, std::uint64_t ordering_id) {
  return derive_seed(seed, kOrderingSeedTag, ordering_id);
}

// Two readings of the expected failed-pair budget: c_psi n with
// c_psi = psi^(-4/3) ln(1/psi), counted once, or multiplied by the ordering
// family size when failures are charged to every ordering. Measured failure
// counts are reported against both.
struct FailureReference {
  double c_psi_n = 0.0;
  double c_eps_c_psi_n = 0.0;
  std::uint64_t family_size = 0;
};

inline FailureReference failure_reference(std::uint64_t n, double psi, double eps, unsigned dim, EuclidMode mode,
                                          std::uint32_t hop_budget) {
  check_psi(psi, "failure_reference");
  FailureReference r;
  r.c_psi_n = std::pow(psi, -4.0 / 3.0) * std::log(1.0 / psi) * static_cast<double>(n);
  r.family_size = build_lso_family(euclid_lso_eps(mode, eps, hop_budget), dim).size();
  r.c_eps_c_psi_n = r.c_psi_n * static_cast<double>(r.family_size);
  return r;
}

struct EuclidBuild {
  GeometricGraph graph;
  std::uint32_t hop_budget = 4;
  double lso_eps = 0.0;
  std::uint64_t family_size = 0;
  std::uint64_t orderings_used = 0;  // prefix of the family visited before the union saturated
  DerivedParams params;              // per-ordering 1-D parameters
};

// Point indices (0-based) sorted by the ordering.
inline std::vector<std::uint32_t> order_points(const Ordering& o, const PointSet& points) {
  std::vector<std::uint32_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    return compare_unchecked(o, points[a], points[b]) == Order::before;
  });
  return perm;
}

/// Union over the ordering family of the 1-D construction applied to the
/// ranks of each ordering, mapped back to point pairs with Euclidean weights.
/// Each ordering gets its own construction seed. Orderings are visited in id
/// order; once the union holds every pair the remaining orderings cannot add
/// anything and are skipped, which does not change the result.
inline EuclidBuild euclidean_dependable_spanner(const PointSet& points, const EuclidOptions& opt) {
  require(opt.eps > 0.0 && opt.eps < 1.0, "euclidean spanner: eps must lie in (0, 1)");
  check_psi(opt.psi, "euclidean spanner");
  require(points.size() >= 2, "euclidean spanner: need at least two points");
  const auto n = static_cast<Vertex>(points.size());

  EuclidBuild out;
  out.hop_budget = euclid_hop_budget(opt.mode, opt.psi);
  out.lso_eps = euclid_lso_eps(opt.mode, opt.eps, out.hop_budget);
  const OrderingFamily family = build_lso_family(out.lso_eps, points.dim());
  out.family_size = family.size();
  const SpannerParams base{.n = n, .psi = opt.psi, .k = out.hop_budget, .c6 = kDefaultC6, .c7 = opt.c7, .seed = 0};
  out.params = derive_params(base, opt.mode == EuclidMode::kFourHop ? RadiusRule::kFourHop : RadiusRule::kKHop);

  const std::uint64_t words_per_row = (n + 63) / 64;
  std::vector<std::uint64_t> present(static_cast<std::size_t>(n) * words_per_row, 0);
  std::uint64_t missing = pair_count(n);

  const std::size_t batch = std::max<std::size_t>(8, 4 * resolve_threads(opt.threads));
  std::vector<std::vector<Edge>> mapped(batch);
  std::uint64_t next_id = 0;
  while (missing > 0 && next_id < family.size()) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, family.size() - next_id));
    parallel_for(count, opt.threads, [&](std::size_t slot) {
      const std::uint64_t id = next_id + slot;
      const std::vector<std::uint32_t> perm = order_points(family.ordering(id), points);
      const std::uint64_t seed = ordering_seed(opt.seed, id);
      const RankGraph ranks = opt.mode == EuclidMode::kFourHop
                                  ? four_hop_spanner(n, opt.psi, opt.c7, seed)
                                  : khop_spanner(n, opt.psi, out.hop_budget, opt.c7, seed);
      std::vector<Edge>& edges = mapped[slot];
      edges.clear();
      edges.reserve(ranks.edge_count());
      for (const Edge& e : ranks.edges()) {
        const Vertex a = perm[e.lo - 1];
        const Vertex b = perm[e.hi - 1];
        edges.push_back(a < b ? Edge{a, b} : Edge{b, a});
      }
    });
    for (std::size_t slot = 0; slot < count && missing > 0; ++slot) {
      for (const Edge& e : mapped[slot]) {
        std::uint64_t& word = present[e.lo * words_per_row + e.hi / 64];
        const std::uint64_t bit = std::uint64_t{1} << (e.hi % 64);
        if (!(word & bit)) {
          word |= bit;
          --missing;
        }
      }
      out.orderings_used = next_id + slot + 1;
    }
    next_id += count;
  }

  std::vector<Edge> edges;
  std::vector<double> weights;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) {
      if (present[a * words_per_row + b / 64] >> (b % 64) & 1u) {
        edges.push_back({a + 1, b + 1});
        weights.push_back(points.distance(a, b));
      }
    }
  }
  out.graph = GeometricGraph(RankGraph::from_sorted(n, std::move(edges), std::move(weights)));
  return out;
}

}  // namespace despan

#endif  // DESPAN_EUCLID_HPP
