#ifndef DESPAN_LSO_HPP
#define DESPAN_LSO_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "despan/error.hpp"
#include "despan/points.hpp"

/// Locality-sensitive orderings of [0,1)^d.
///
/// Realization: shifted dyadic grids refined in chunks of h bits.
///
///  * Coordinates are quantized to 52 bits and shifted by j/D along the
///    diagonal, j = 0..D-1, where D is the smallest odd number > d. A shifted
///    coordinate has 53 bits; its top l bits name the depth-l cell (cells
///    are half-open per axis).
///  * For a phase r in [0, h) the depths r, r+h, r+2h, ... are the levels of
///    a tree whose nodes own an m x ... x m grid of sub-cells, m = 2^h.
///  * The N = m^d sub-cells are ordered by one of the N/2 Walecki paths of
///    K_N (path k visits k, k+1, k-1, k+2, ... mod N). Every pair of
///    sub-cells is consecutive on exactly one path.
///  * A point order is the lexicographic order of root-to-leaf sub-cell
///    sequences under the chosen path; ties after quantization fall back to
///    comparing raw coordinates.
///
/// Two points first split at depth l. In the shift where they share the
/// smallest cell (side at most 2D times their distance) and with phase
/// l mod h, they sit in distinct sub-cells a, b of one node; on the path
/// where a and b are consecutive, everything between them lies in a or b.
/// With m >= 2 D sqrt(d) / eps those sub-cells have diameter at most
/// eps |pq|, which is the locality guarantee.
///
/// Ordering 0 is the plain Morton order of the unshifted points (the natural
/// order when d = 1).
namespace despan {

enum class Order { before, equal, after };

inline constexpr unsigned kQuantBits = 52;
inline constexpr unsigned kShiftedBits = kQuantBits + 1;

inline unsigned lso_shift_count(unsigned dim) { return (dim + 1) % 2 == 1 ? dim + 1 : dim + 2; }

struct Ordering {
  std::uint64_t id = 0;
  unsigned dim = 1;
  unsigned shift_count = 1;  // D
  unsigned shift_index = 0;  // j; the shift vector is (j/D, ..., j/D)
  unsigned grid_bits = 1;    // h
  unsigned phase = 0;        // r
  std::uint64_t path = 0;    // Walecki path over the m^d sub-cells

  bool natural() const noexcept { return id == 0; }

  std::vector<double> shift_vector() const {
    return std::vector<double>(dim, natural() ? 0.0 : static_cast<double>(shift_index) / shift_count);
  }

  friend bool operator==(const Ordering&, const Ordering&) = default;
};

namespace detail {

inline std::uint64_t quantize(double x) noexcept {
  return static_cast<std::uint64_t>(x * 0x1.0p52);  // exact scaling; floor for x >= 0
}

inline std::uint64_t shift_offset(unsigned j, unsigned count) noexcept {
  return (static_cast<std::uint64_t>(j) << kQuantBits) / count;
}

// Leading bits shared by two kShiftedBits-wide values.
inline unsigned shared_depth(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t x = a ^ b;
  if (x == 0) return kShiftedBits;
  return static_cast<unsigned>(std::countl_zero(x)) - (64 - kShiftedBits);
}

// Bits [start, start + width) counted from the top of a kShiftedBits value;
// bits past the end read as zero.
inline std::uint64_t chunk_bits(std::uint64_t x, unsigned start, unsigned width) noexcept {
  const int shift = static_cast<int>(kShiftedBits) - static_cast<int>(start + width);
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  return (shift >= 0 ? x >> shift : x << -shift) & mask;
}

inline std::uint64_t walecki_position(std::uint64_t v, std::uint64_t path, std::uint64_t cells) noexcept {
  const std::uint64_t delta = (v + cells - path) % cells;
  if (delta == 0) return 0;
  if (delta <= cells / 2) return 2 * delta - 1;
  return 2 * (cells - delta);
}

// The unique path on which sub-cells a != b are consecutive.
inline std::uint64_t walecki_path_of(std::uint64_t a, std::uint64_t b, std::uint64_t cells) noexcept {
  return ((a + b) % cells) / 2;
}

inline std::uint64_t reverse_bits(std::uint64_t x, unsigned bits) noexcept {
  std::uint64_t r = 0;
  for (unsigned i = 0; i < bits; ++i) r |= ((x >> i) & 1u) << (bits - 1 - i);
  return r;
}

inline Order raw_lexicographic(std::span<const double> p, std::span<const double> q) noexcept {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < q[k]) return Order::before;
    if (p[k] > q[k]) return Order::after;
  }
  return Order::equal;
}

inline Order morton(std::span<const double> p, std::span<const double> q) noexcept {
  unsigned axis = 0;
  std::uint64_t best = 0;
  for (unsigned k = 0; k < p.size(); ++k) {
    const std::uint64_t x = quantize(p[k]) ^ quantize(q[k]);
    if (best < x && best < (best ^ x)) {
      axis = k;
      best = x;
    }
  }
  if (best == 0) return raw_lexicographic(p, q);
  return quantize(p[axis]) < quantize(q[axis]) ? Order::before : Order::after;
}

}  // namespace detail

// No range checks; see compare_points.
inline Order compare_unchecked(const Ordering& o, std::span<const double> p, std::span<const double> q) noexcept {
  if (o.natural()) return detail::morton(p, q);
  const std::uint64_t offset = detail::shift_offset(o.shift_index, o.shift_count);
  unsigned depth = kShiftedBits;
  for (unsigned k = 0; k < o.dim; ++k) {
    depth = std::min(depth, detail::shared_depth(detail::quantize(p[k]) + offset,
                                                 detail::quantize(q[k]) + offset));
  }
  if (depth >= kShiftedBits) return detail::raw_lexicographic(p, q);

  const unsigned h = o.grid_bits;
  unsigned start = 0;
  unsigned width = o.phase;
  if (depth >= o.phase) {
    start = o.phase + ((depth - o.phase) / h) * h;
    width = h;
  }
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  for (unsigned k = 0; k < o.dim; ++k) {
    a |= detail::chunk_bits(detail::quantize(p[k]) + offset, start, width) << (width * k);
    b |= detail::chunk_bits(detail::quantize(q[k]) + offset, start, width) << (width * k);
  }
  if (width != h) return a < b ? Order::before : Order::after;  // leading partial chunk
  const std::uint64_t cells = std::uint64_t{1} << (h * o.dim);
  return detail::walecki_position(a, o.path, cells) < detail::walecki_position(b, o.path, cells)
             ? Order::before
             : Order::after;
}

inline Order compare_points(const Ordering& o, std::span<const double> p, std::span<const double> q) {
  require(p.size() == o.dim && q.size() == o.dim, "compare_points: dimension mismatch");
  for (double c : p) require(c >= 0.0 && c < 1.0, "compare_points: coordinate outside [0, 1)");
  for (double c : q) require(c >= 0.0 && c < 1.0, "compare_points: coordinate outside [0, 1)");
  return compare_unchecked(o, p, q);
}

/// The family for (eps, d): ordering 0 plus one ordering per
/// (path, phase, shift). Orderings are generated on demand from their id;
/// ids enumerate paths in bit-reversed order so that any prefix of the
/// family mixes distant paths.
class OrderingFamily {
 public:
  OrderingFamily(double eps, unsigned dim) : eps_(eps), dim_(dim) {
    require(eps > 0.0 && eps <= 0.5, "build_lso_family: eps must lie in (0, 1/2]");
    require(dim >= 1, "build_lso_family: dimension must be >= 1");
    shift_count_ = lso_shift_count(dim);
    const double needed = 2.0 * shift_count_ * std::sqrt(static_cast<double>(dim)) / eps;
    grid_bits_ = std::max(1u, static_cast<unsigned>(std::ceil(std::log2(needed))));
    require(grid_bits_ * dim_ <= 40, "build_lso_family: sub-cell grid too fine for (eps, d)");
    path_bits_ = grid_bits_ * dim_ - 1;
  }

  double eps() const noexcept { return eps_; }
  unsigned dim() const noexcept { return dim_; }
  unsigned shift_count() const noexcept { return shift_count_; }
  unsigned grid_bits() const noexcept { return grid_bits_; }
  std::uint64_t cells() const noexcept { return std::uint64_t{1} << (grid_bits_ * dim_); }
  std::uint64_t paths() const noexcept { return cells() / 2; }
  std::uint64_t size() const noexcept { return 1 + paths() * grid_bits_ * shift_count_; }

  Ordering ordering(std::uint64_t id) const {
    require(id < size(), "ordering id out of range");
    Ordering o{.id = id, .dim = dim_, .shift_count = shift_count_, .shift_index = 0,
               .grid_bits = grid_bits_, .phase = 0, .path = 0};
    if (id == 0) return o;
    std::uint64_t q = id - 1;
    o.shift_index = static_cast<unsigned>(q % shift_count_);
    q /= shift_count_;
    o.phase = static_cast<unsigned>(q % grid_bits_);
    o.path = detail::reverse_bits(q / grid_bits_, path_bits_);
    return o;
  }

  std::uint64_t id_of(unsigned shift_index, unsigned phase, std::uint64_t path) const noexcept {
    const std::uint64_t slot = detail::reverse_bits(path, path_bits_);
    return 1 + (slot * grid_bits_ + phase) * shift_count_ + shift_index;
  }

  // Orderings most likely to be local for (p, q), best first: per shift, the
  // one separating p and q right below their smallest shared cell.
  std::vector<std::uint64_t> candidates(std::span<const double> p, std::span<const double> q) const {
    std::vector<std::pair<unsigned, std::uint64_t>> ranked;  // (shared depth, id)
    for (unsigned j = 0; j < shift_count_; ++j) {
      const std::uint64_t offset = detail::shift_offset(j, shift_count_);
      unsigned depth = kShiftedBits;
      for (unsigned k = 0; k < dim_; ++k) {
        depth = std::min(depth, detail::shared_depth(detail::quantize(p[k]) + offset,
                                                     detail::quantize(q[k]) + offset));
      }
      if (depth >= kShiftedBits) continue;
      std::uint64_t a = 0;
      std::uint64_t b = 0;
      for (unsigned k = 0; k < dim_; ++k) {
        a |= detail::chunk_bits(detail::quantize(p[k]) + offset, depth, grid_bits_) << (grid_bits_ * k);
        b |= detail::chunk_bits(detail::quantize(q[k]) + offset, depth, grid_bits_) << (grid_bits_ * k);
      }
      const std::uint64_t path = detail::walecki_path_of(a, b, cells());
      ranked.emplace_back(depth, id_of(j, depth % grid_bits_, path));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    std::vector<std::uint64_t> out;
    for (const auto& r : ranked) out.push_back(r.second);
    out.push_back(0);
    return out;
  }

  /// Documented constant: size() <= size_constant(d) * eps^-d * log2(2/eps).
  static double size_constant(unsigned dim) {
    const double dd = static_cast<double>(dim);
    const double base = lso_shift_count(dim) * std::sqrt(dd);
    return lso_shift_count(dim) * std::pow(4.0 * base, dd) * (2.0 + std::log2(base));
  }

  double size_bound() const {
    return size_constant(dim_) * std::pow(eps_, -static_cast<double>(dim_)) * std::log2(2.0 / eps_);
  }

 private:
  double eps_;
  unsigned dim_;
  unsigned shift_count_ = 1;
  unsigned grid_bits_ = 1;
  unsigned path_bits_ = 0;
};

inline OrderingFamily build_lso_family(double eps, unsigned dim) { return OrderingFamily(eps, dim); }

// True when every point of P strictly between u and v under o lies within
// eps |uv| of u or of v (closed balls).
inline bool is_local(const Ordering& o, const PointSet& points, std::size_t u, std::size_t v, double eps) {
  std::size_t lo = u;
  std::size_t hi = v;
  if (compare_unchecked(o, points[u], points[v]) == Order::after) std::swap(lo, hi);
  const double reach = eps * points.distance(u, v);
  for (std::size_t w = 0; w < points.size(); ++w) {
    if (w == u || w == v) continue;
    if (compare_unchecked(o, points[lo], points[w]) != Order::before) continue;
    if (compare_unchecked(o, points[w], points[hi]) != Order::before) continue;
    if (points.distance(w, u) > reach && points.distance(w, v) > reach) return false;
  }
  return true;
}

// Some ordering of the family that is eps-local for (u, v) on P, if any.
// The designed candidates are tried first, then the whole family in id order.
inline std::optional<std::uint64_t> locality_witness(const OrderingFamily& family, const PointSet& points,
                                                     std::size_t u, std::size_t v) {
  require(points.dim() == family.dim(), "locality_witness: dimension mismatch");
  require(u < points.size() && v < points.size(), "locality_witness: point not in P");
  require(u != v, "locality_witness: u and v must differ");
  const std::vector<std::uint64_t> first = family.candidates(points[u], points[v]);
  for (std::uint64_t id : first) {
    if (is_local(family.ordering(id), points, u, v, family.eps())) return id;
  }
  for (std::uint64_t id = 0; id < family.size(); ++id) {
    if (std::find(first.begin(), first.end(), id) != first.end()) continue;
    if (is_local(family.ordering(id), points, u, v, family.eps())) return id;
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> locality_witness(const OrderingFamily& family, const PointSet& points,
                                                     std::span<const double> u, std::span<const double> v) {
  const std::size_t iu = points.find(u);
  const std::size_t iv = points.find(v);
  require(iu < points.size() && iv < points.size(), "locality_witness: point not in P");
  return locality_witness(family, points, iu, iv);
}

}  // namespace despan

#endif  // DESPAN_LSO_HPP
