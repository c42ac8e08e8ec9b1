#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "despan/rank_graph.hpp"
#include "despan/random.hpp"

using namespace despan;

namespace {

RankGraph random_graph(Vertex n, double density, std::uint64_t seed) {
  const RandomStream s = derive_stream(seed, 0);
  std::vector<Edge> edges;
  for (Vertex i = 1; i <= n; ++i) {
    for (Vertex j = i + 1; j <= n; ++j) {
      if (s.bernoulli_at(pair_counter(i, j), density)) edges.push_back({i, j});
    }
  }
  return RankGraph(n, edges);
}

std::set<std::pair<Vertex, Vertex>> edge_set(const RankGraph& g) {
  std::set<std::pair<Vertex, Vertex>> out;
  for (const Edge& e : g.edges()) out.insert({e.lo, e.hi});
  return out;
}

}  // namespace

TEST(RandomStream, SameSeedAndIndexRepeat) {
  RandomStream a = derive_stream(42, 7);
  RandomStream b = derive_stream(42, 7);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(RandomStream, DistinctIndicesDiffer) {
  RandomStream a = derive_stream(42, 0);
  RandomStream b = derive_stream(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next() == b.next();
  EXPECT_EQ(equal, 0);
}

// Pinned outputs: any platform must reproduce these exact words.
TEST(RandomStream, PinnedValues) {
  EXPECT_EQ(RandomStream::mix64(0), 0u);
  EXPECT_EQ(RandomStream::mix64(RandomStream::kGamma), 0xe220a8397b1dcdafULL);  // SplitMix64(0) first output
  const RandomStream s = derive_stream(1, 0);
  const std::uint64_t k0 = RandomStream::mix64(1 + RandomStream::kGamma);
  EXPECT_EQ(s.key(), RandomStream::mix64(k0 + RandomStream::kGamma));
  EXPECT_EQ(s.at(5), RandomStream::mix64(s.key() + RandomStream::mix64(5 + RandomStream::kGamma)));
}

TEST(RandomStream, UniformMoments) {
  RandomStream s = derive_stream(3, 3);
  const int count = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double u = s.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / count, 0.5, 4 * std::sqrt(1.0 / 12 / count));
  EXPECT_NEAR(sq / count, 1.0 / 3, 0.005);
}

TEST(RandomStream, NextBelowCoversRange) {
  RandomStream s = derive_stream(9, 1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[s.next_below(7)];
  for (int h : hits) EXPECT_GT(h, 850);
}

TEST(RandomStream, DeriveSeedSeparatesTags) {
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_EQ(derive_seed(5, 2, 3), derive_seed(5, 2, 3));
}

TEST(RankGraph, CompleteGraphCounts) {
  EXPECT_EQ(complete_graph(1).edge_count(), 0u);
  EXPECT_EQ(complete_graph(4).edge_count(), 6u);
  EXPECT_EQ(complete_graph(10).edge_count(), 45u);
  EXPECT_THROW(complete_graph(0), ValidationError);
}

TEST(RankGraph, IntervalGraphCounts) {
  EXPECT_EQ(interval_graph(10, 3).edge_count(), 24u);
  EXPECT_EQ(interval_graph(5, 0).edge_count(), 0u);
  EXPECT_EQ(interval_graph(5, 4).edge_count(), 10u);
  EXPECT_EQ(interval_graph(5, 100), complete_graph(5));
  const RankGraph g = interval_graph(10, 3);
  for (const Edge& e : g.edges()) EXPECT_LE(e.hi - e.lo, 3u);
}

TEST(RankGraph, RejectsBadEdges) {
  EXPECT_THROW(RankGraph(3, {{1, 1}}), ValidationError);
  EXPECT_THROW(RankGraph(3, {{1, 4}}), ValidationError);
  EXPECT_THROW(RankGraph(3, {{0, 2}}), ValidationError);
  EXPECT_THROW(RankGraph(3, {{1, 2}, {2, 1}}), ValidationError);
  EXPECT_THROW(RankGraph(3, {{1, 2}}, {0.0}), ValidationError);
  EXPECT_THROW(RankGraph(3, {{1, 2}}, {1.0, 2.0}), ValidationError);
}

TEST(RankGraph, CanonicalizesAndKeepsWeights) {
  const RankGraph g(4, {{3, 1}, {1, 2}}, {5.0, 7.0});
  ASSERT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.edges()[0], (Edge{1, 2}));
  EXPECT_EQ(g.weights()[0], 7.0);
  EXPECT_EQ(g.weights()[1], 5.0);
  EXPECT_EQ(interval_graph(4, 3).weight(interval_graph(4, 3).find(1, 4)), 3.0);
  EXPECT_TRUE(g.contains(3, 1));
  EXPECT_FALSE(g.contains(2, 3));
}

TEST(FilterEdges, Extremes) {
  const RankGraph k = complete_graph(30);
  EXPECT_EQ(filter_edges(k, 1.0, derive_stream(1, 0)), k);
  EXPECT_EQ(filter_edges(k, 0.0, derive_stream(1, 0)).edge_count(), 0u);
  EXPECT_THROW(filter_edges(k, 1.5, derive_stream(1, 0)), ValidationError);
  EXPECT_THROW(filter_edges(k, -0.1, derive_stream(1, 0)), ValidationError);
}

TEST(FilterEdges, DeterministicSubgraphWithWeights) {
  const RankGraph g(5, {{1, 2}, {2, 5}, {1, 4}, {3, 4}}, {1.5, 2.5, 3.5, 4.5});
  for (std::uint64_t t = 0; t < 50; ++t) {
    const RankGraph f = filter_edges(g, 0.5, derive_stream(11, t));
    EXPECT_EQ(f, filter_edges(g, 0.5, derive_stream(11, t)));
    for (std::size_t i = 0; i < f.edge_count(); ++i) {
      const std::size_t at = g.find(f.edges()[i].lo, f.edges()[i].hi);
      ASSERT_LT(at, g.edge_count());
      EXPECT_EQ(f.weights()[i], g.weights()[at]);
    }
  }
}

TEST(FilterEdges, MeanKeptMatchesBinomial) {
  const RankGraph k = complete_graph(100);
  const int trials = 1000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += filter_edges(k, 0.5, derive_stream(2024, t)).edge_count();
  const double mean = sum / trials;
  const double se = std::sqrt(4950 * 0.25 / trials);
  EXPECT_NEAR(mean, 2475.0, 3 * se);
}

TEST(FilterEdges, DeviationBoundOverRandomGraphs) {
  // |mean - psi |E|| <= 4 sqrt(psi (1-psi) |E| / T) for every graph tried.
  for (std::uint64_t gseed = 0; gseed < 10; ++gseed) {
    const RankGraph g = random_graph(40, 0.3, gseed);
    const double psi = 0.2 + 0.06 * gseed;
    const int trials = 300;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const RankGraph f = filter_edges(g, psi, derive_stream(gseed + 100, t));
      for (const Edge& e : f.edges()) ASSERT_TRUE(g.contains(e.lo, e.hi));
      sum += f.edge_count();
    }
    const double m = static_cast<double>(g.edge_count());
    EXPECT_LE(std::abs(sum / trials - psi * m), 4 * std::sqrt(psi * (1 - psi) * m / trials));
  }
}

TEST(FilterEdges, SharedEdgesAgreeAcrossGraphs) {
  const RankGraph big = complete_graph(40);
  const RankGraph small = interval_graph(40, 5);
  const RandomStream s = derive_stream(8, 3);
  const RankGraph fb = filter_edges(big, 0.4, s);
  const RankGraph fs = filter_edges(small, 0.4, s);
  for (const Edge& e : small.edges()) EXPECT_EQ(fb.contains(e.lo, e.hi), fs.contains(e.lo, e.hi));
}

TEST(GraphUnion, Examples) {
  const RankGraph path(3, {{1, 2}, {2, 3}});
  const RankGraph chord(3, {{1, 3}});
  EXPECT_EQ(graph_union(path, chord).edge_count(), 3u);
  EXPECT_EQ(graph_union(path, RankGraph(3, {})), path);
  EXPECT_EQ(graph_union(path, path), path);
  EXPECT_THROW(graph_union(path, RankGraph(4, {})), ValidationError);
}

TEST(GraphUnion, WeightsAgreeOrFail) {
  const RankGraph a(3, {{1, 2}}, {0.5});
  const RankGraph b(3, {{1, 2}, {2, 3}}, {0.5, 0.25});
  const RankGraph u = graph_union(a, b);
  EXPECT_EQ(u.edge_count(), 2u);
  EXPECT_EQ(u.weights()[1], 0.25);
  EXPECT_THROW(graph_union(a, RankGraph(3, {{1, 2}}, {0.75})), ValidationError);
  const RankGraph mixed = graph_union(RankGraph(3, {{1, 3}}), a);
  EXPECT_EQ(mixed.weights()[mixed.find(1, 3)], 2.0);
  EXPECT_EQ(graph_union(RankGraph(3, {{1, 2}}), a).weights()[0], 0.5);
}

TEST(GraphUnion, AssociativeAndCommutative) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RankGraph a = random_graph(12, 0.3, 3 * s);
    const RankGraph b = random_graph(12, 0.3, 3 * s + 1);
    const RankGraph c = random_graph(12, 0.3, 3 * s + 2);
    EXPECT_EQ(graph_union(a, b), graph_union(b, a));
    EXPECT_EQ(graph_union(graph_union(a, b), c), graph_union(a, graph_union(b, c)));
    auto expected = edge_set(a);
    for (auto e : edge_set(b)) expected.insert(e);
    EXPECT_EQ(edge_set(graph_union(a, b)), expected);
  }
}
