#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "despan/reachability.hpp"
#include "oracles.hpp"

using namespace despan;

namespace {

std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_of(const RankGraph& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const Edge& e : g.edges()) out.emplace_back(e.lo, e.hi);
  return out;
}

RankGraph random_graph(Vertex n, double density, std::uint64_t seed) {
  return filter_edges(complete_graph(n), density, derive_stream(seed, 99));
}

RankGraph path_graph(Vertex n) { return interval_graph(n, 1); }

}  // namespace

TEST(StraightReachable, HandTraces) {
  const RankGraph a(4, {{1, 2}, {2, 4}});
  const ReachRow ra = straight_reachable(a, 1);
  EXPECT_TRUE(ra[2]);
  EXPECT_FALSE(ra[3]);
  EXPECT_TRUE(ra[4]);

  const RankGraph b(4, {{1, 2}, {3, 4}});
  const ReachRow rb = straight_reachable(b, 1);
  EXPECT_TRUE(rb[2]);
  EXPECT_FALSE(rb[3]);
  EXPECT_FALSE(rb[4]);

  const RankGraph k = complete_graph(9);
  for (Vertex i = 1; i <= 9; ++i) {
    const ReachRow r = straight_reachable(k, i);
    for (Vertex j = i + 1; j <= 9; ++j) EXPECT_TRUE(r[j]);
  }
  EXPECT_THROW(straight_reachable(a, 0), ValidationError);
  EXPECT_THROW(straight_reachable(a, 5), ValidationError);
}

TEST(StraightHops, HandTraces) {
  const HopRow k = straight_hops(complete_graph(6), 1);
  for (Vertex j = 2; j <= 6; ++j) EXPECT_EQ(k[j], 1u);
  const HopRow p = straight_hops(path_graph(7), 1);
  for (Vertex j = 2; j <= 7; ++j) EXPECT_EQ(p[j], j - 1);
  const HopRow h = straight_hops(RankGraph(6, {{1, 3}, {3, 6}, {1, 6}}), 1);
  EXPECT_EQ(h[6], 1u);
  EXPECT_EQ(h[3], 1u);
  EXPECT_EQ(h[2], kInfiniteHops);
  EXPECT_EQ(h[4], kInfiniteHops);
  EXPECT_EQ(h[5], kInfiniteHops);
  EXPECT_THROW(straight_hops(complete_graph(3), 4), ValidationError);
}

TEST(StraightHops, AgreesWithReachability) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const RankGraph g = random_graph(20, 0.2, s);
    for (Vertex i = 1; i <= 20; ++i) {
      const ReachRow r = straight_reachable(g, i);
      const HopRow h = straight_hops(g, i);
      for (Vertex j = i + 1; j <= 20; ++j) EXPECT_EQ(r[j] != 0, h[j] != kInfiniteHops);
    }
  }
}

TEST(Deficiency, Examples) {
  EXPECT_EQ(deficiency(complete_graph(12)), 0u);
  EXPECT_EQ(deficiency(RankGraph(5, {})), 10u);
  EXPECT_EQ(deficiency(RankGraph(3, {{1, 3}})), 2u);
  EXPECT_EQ(deficiency(RankGraph(1, {})), 0u);
}

TEST(KHopDeficiency, Examples) {
  EXPECT_EQ(khop_deficiency(complete_graph(10), 1), 0u);
  EXPECT_EQ(khop_deficiency(path_graph(4), 1), 3u);
  EXPECT_EQ(khop_deficiency(path_graph(4), 3), 0u);
  EXPECT_THROW(khop_deficiency(path_graph(4), 0), ValidationError);
}

TEST(Deficiency, ExhaustiveSmallGraphs) {
  for (Vertex n = 1; n <= 5; ++n) {
    const RankGraph k = complete_graph(n);
    const auto all = k.edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
      std::vector<Edge> edges;
      for (std::size_t b = 0; b < all.size(); ++b) {
        if (mask >> b & 1) edges.push_back(all[b]);
      }
      const RankGraph g(n, edges);
      const auto adj = oracle::adjacency(n, pairs_of(g));
      ASSERT_EQ(deficiency(g), oracle::failed_pairs(adj)) << "n=" << n << " mask=" << mask;
      for (std::uint32_t k = 1; k <= 4; ++k) {
        ASSERT_EQ(khop_deficiency(g, k), oracle::failed_pairs(adj, k)) << "n=" << n << " k=" << k;
      }
    }
  }
}

TEST(Deficiency, SampledSevenVertexGraphs) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const RankGraph g = random_graph(7, 0.15 + 0.001 * s, s);
    const auto adj = oracle::adjacency(7, pairs_of(g));
    ASSERT_EQ(deficiency(g), oracle::failed_pairs(adj));
    ASSERT_EQ(khop_deficiency(g, 2), oracle::failed_pairs(adj, 2));
  }
}

TEST(Deficiency, BlockBoundaryOnLargerGraphs) {
  // More than one 64-bit word of sources, compared against per-source sweeps.
  const RankGraph g = random_graph(150, 0.03, 5);
  std::uint64_t expected = 0;
  std::uint64_t expected_k3 = 0;
  for (Vertex i = 1; i <= 150; ++i) {
    const HopRow h = straight_hops(g, i);
    for (Vertex j = i + 1; j <= 150; ++j) {
      expected += h[j] == kInfiniteHops;
      expected_k3 += h[j] > 3;
    }
  }
  EXPECT_EQ(deficiency(g), expected);
  EXPECT_EQ(khop_deficiency(g, 3), expected_k3);
}

TEST(Deficiency, MonotoneUnderEdgeAddition) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const RankGraph g = random_graph(14, 0.2, s);
    const RankGraph more = graph_union(g, random_graph(14, 0.05, s + 1000));
    EXPECT_LE(deficiency(more), deficiency(g));
    for (std::uint32_t k = 1; k <= 4; ++k) EXPECT_LE(khop_deficiency(more, k), khop_deficiency(g, k));
  }
}

TEST(KHopDeficiency, NonIncreasingInK) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RankGraph g = random_graph(16, 0.25, s);
    std::uint64_t prev = khop_deficiency(g, 1);
    for (std::uint32_t k = 2; k <= 15; ++k) {
      const std::uint64_t cur = khop_deficiency(g, k);
      EXPECT_LE(cur, prev);
      prev = cur;
    }
    EXPECT_EQ(khop_deficiency(g, 15), deficiency(g));
    EXPECT_EQ(khop_deficiency(g, 40), deficiency(g));
  }
}

TEST(PairFailures, LongSplitAndSources) {
  const RankGraph g = random_graph(60, 0.08, 17);
  const PairFailures all = count_pair_failures(g, {.hop_bound = 3, .long_threshold = 10, .sources = {}});
  std::uint64_t total = 0;
  std::uint64_t longs = 0;
  for (Vertex i = 1; i <= 60; ++i) {
    const HopRow h = straight_hops(g, i);
    for (Vertex j = i + 1; j <= 60; ++j) {
      if (h[j] > 3) {
        ++total;
        longs += j - i > 10;
      }
    }
  }
  EXPECT_EQ(all.total, total);
  EXPECT_EQ(all.long_pairs, longs);

  const std::vector<Vertex> sources{3, 17, 40};
  const PairFailures part = count_pair_failures(g, {.hop_bound = {}, .long_threshold = {}, .sources = sources});
  std::uint64_t expected = 0;
  for (Vertex i : sources) {
    const ReachRow r = straight_reachable(g, i);
    for (Vertex j = i + 1; j <= 60; ++j) expected += !r[j];
  }
  EXPECT_EQ(part.total, expected);
  EXPECT_THROW(count_pair_failures(g, {.hop_bound = {}, .long_threshold = {}, .sources = std::vector<Vertex>{5, 5}}),
               ValidationError);
}

TEST(TwoHopProbability, Examples) {
  EXPECT_DOUBLE_EQ(no_two_hop_probability(1, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(no_two_hop_probability(2, 0.5), 0.375);
  EXPECT_DOUBLE_EQ(no_two_hop_probability(17, 1.0), 0.0);
  EXPECT_THROW(no_two_hop_probability(0, 0.5), ValidationError);
  EXPECT_THROW(no_two_hop_probability(3, 1.5), ValidationError);
}

TEST(TwoHopProbability, MatchesSubsetEnumeration) {
  for (std::uint32_t delta = 1; delta <= 7; ++delta) {
    for (double psi : {0.1, 0.3, 0.5, 0.77, 0.95}) {
      EXPECT_NEAR(no_two_hop_probability(delta, psi), oracle::no_two_hop_probability_by_subsets(delta, psi), 1e-12);
    }
  }
}

TEST(TwoHopProbability, Sandwich) {
  for (std::uint32_t delta = 1; delta <= 64; ++delta) {
    for (int g = 0; g <= 20; ++g) {
      const double psi = g / 20.0;
      const double p = no_two_hop_probability(delta, psi);
      EXPECT_LE(std::pow(1.0 - psi, delta), p * (1 + 1e-12) + 1e-300);
      EXPECT_DOUBLE_EQ(p, (1.0 - psi) * std::pow(1.0 - psi * psi, delta - 1.0));
    }
  }
}

TEST(ExpectedTwoHop, Examples) {
  EXPECT_DOUBLE_EQ(expected_two_hop_deficiency(2, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(expected_two_hop_deficiency(3, 0.5), 1.375);
  EXPECT_DOUBLE_EQ(expected_two_hop_deficiency(100, 1.0), 0.0);
  EXPECT_THROW(expected_two_hop_deficiency(1, 0.5), ValidationError);
  EXPECT_THROW(expected_two_hop_deficiency(5, 0.0), ValidationError);
}

TEST(ExpectedTwoHop, MatchesFullSubsetEnumeration) {
  for (std::uint32_t n = 2; n <= 5; ++n) {
    for (double psi : {0.2, 0.5, 0.9}) {
      EXPECT_NEAR(expected_two_hop_deficiency(n, psi), oracle::expected_two_hop_failures_by_subsets(n, psi), 1e-10);
    }
  }
}

TEST(ExpectedTwoHop, BelowNOverPsiSquared) {
  for (std::uint64_t n : {2u, 10u, 200u, 5000u}) {
    for (double psi : {0.05, 0.3, 0.5, 0.99}) EXPECT_LE(expected_two_hop_deficiency(n, psi), n / (psi * psi));
  }
}

TEST(MonteCarlo, TrivialCases) {
  const DeficiencyReport a = monte_carlo_deficiency(complete_graph(20), 1.0, 10, 3);
  EXPECT_EQ(a.mean_failed_pairs, 0.0);
  EXPECT_EQ(a.std_error, 0.0);
  const DeficiencyReport b = monte_carlo_deficiency(complete_graph(10), 0.0, 10, 3);
  EXPECT_EQ(b.mean_failed_pairs, 45.0);
  EXPECT_EQ(b.std_error, 0.0);
  EXPECT_THROW(monte_carlo_deficiency(complete_graph(10), 0.5, 0, 3), ValidationError);
}

TEST(MonteCarlo, ReportInvariants) {
  const RankGraph g = random_graph(30, 0.3, 4);
  const DeficiencyReport r = monte_carlo_deficiency(g, 0.6, 25, 77);
  ASSERT_EQ(r.per_trial_counts.size(), 25u);
  double sum = 0.0;
  for (double c : r.per_trial_counts) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 435.0);
    sum += c;
  }
  EXPECT_DOUBLE_EQ(r.mean_failed_pairs, sum / 25);
  double ss = 0.0;
  for (double c : r.per_trial_counts) ss += (c - r.mean_failed_pairs) * (c - r.mean_failed_pairs);
  EXPECT_NEAR(r.std_error, std::sqrt(ss / 24 / 25), 1e-12);
  for (std::size_t t = 0; t < 25; ++t) {
    EXPECT_EQ(r.per_trial_counts[t], deficiency(filter_edges(g, 0.6, derive_stream(77, t))));
  }
}

TEST(MonteCarlo, ThreadCountDoesNotMatter) {
  const RankGraph g = complete_graph(120);
  const auto one = monte_carlo_deficiency(g, 0.3, 16, 5, {.hop_bound = 2, .sampled_sources = 0, .threads = 1});
  const auto many = monte_carlo_deficiency(g, 0.3, 16, 5, {.hop_bound = 2, .sampled_sources = 0, .threads = 4});
  EXPECT_EQ(one.per_trial_counts, many.per_trial_counts);
  EXPECT_EQ(one.std_error, many.std_error);
}

TEST(MonteCarlo, TwoHopAgreesWithClosedForm) {
  const auto r = monte_carlo_deficiency(complete_graph(200), 0.5, 2000, 12, {.hop_bound = 2, .sampled_sources = 0, .threads = 0});
  EXPECT_NEAR(r.mean_failed_pairs, expected_two_hop_deficiency(200, 0.5), 3 * r.std_error);
}

TEST(MonteCarlo, SourceSamplingIsUnbiased) {
  const RankGraph g = complete_graph(300);
  const auto exact = monte_carlo_deficiency(g, 0.2, 200, 9);
  const auto sampled = monte_carlo_deficiency(g, 0.2, 200, 9, {.hop_bound = {}, .sampled_sources = 60, .threads = 0});
  EXPECT_EQ(sampled.sampled_sources, 60u);
  const double se = std::sqrt(exact.std_error * exact.std_error + sampled.std_error * sampled.std_error);
  EXPECT_NEAR(sampled.mean_failed_pairs, exact.mean_failed_pairs, 4 * se);
}

TEST(SampleSources, DistinctSortedInRange) {
  RandomStream s = derive_stream(1, 1);
  const auto v = sample_sources(50, 20, s);
  ASSERT_EQ(v.size(), 20u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_GE(v[i], 1u);
    EXPECT_LE(v[i], 50u);
    if (i) EXPECT_LT(v[i - 1], v[i]);
  }
  RandomStream all = derive_stream(1, 2);
  EXPECT_EQ(sample_sources(5, 5, all), (std::vector<Vertex>{1, 2, 3, 4, 5}));
}
