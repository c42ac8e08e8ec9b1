#ifndef DESPAN_TESTS_EXPANSION_HPP
#define DESPAN_TESTS_EXPANSION_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "despan/reachability.hpp"
#include "despan/spanners_1d.hpp"

namespace expansion {

using namespace despan;

// One trial of a connector between X = [1..M] and Y = [M+1..2M] at rate tau,
// filtered at psi. S is a fresh random subset of X for each size.
struct Reach {
  std::uint64_t single = 0;
  std::uint64_t half = 0;   // |S| = ceil(psi M / 2)
  std::uint64_t large = 0;  // |S| = ceil(psi^(2/3) M)
};

inline std::uint64_t half_size(std::uint64_t m, double psi) { return static_cast<std::uint64_t>(std::ceil(psi * m / 2.0)); }
inline std::uint64_t large_size(std::uint64_t m, double psi) {
  return static_cast<std::uint64_t>(std::ceil(std::pow(psi, 2.0 / 3.0) * m));
}

inline Reach trial(std::uint64_t m, double tau, double psi, std::uint64_t master, std::uint64_t t) {
  const auto mm = static_cast<Vertex>(m);
  const Block x{1, mm};
  const Block y{mm + 1, 2 * mm};
  const auto connector = bipartite_connector(x, y, tau, derive_stream(master, 2 * t));
  RandomStream stream = derive_stream(master, 2 * t + 1);
  const RankGraph filtered = filter_edges(RankGraph(2 * mm, connector), psi, stream);
  const auto edges = filtered.edges();
  Reach r;
  auto reach_of = [&](std::uint64_t size) {
    const std::vector<Vertex> s = sample_sources(mm, static_cast<std::uint32_t>(size), stream);
    return connector_reach(edges, s);
  };
  r.single = reach_of(1);
  r.half = reach_of(half_size(m, psi));
  r.large = reach_of(large_size(m, psi));
  return r;
}

// Thresholds psi M / 4, psi^(2/3) M / 4, psi^(1/3) M / 4.
inline double single_threshold(std::uint64_t m, double psi) { return psi * m / 4.0; }
inline double half_threshold(std::uint64_t m, double psi) { return std::pow(psi, 2.0 / 3.0) * m / 4.0; }
inline double large_threshold(std::uint64_t m, double psi) { return std::pow(psi, 1.0 / 3.0) * m / 4.0; }

}  // namespace expansion

#endif
