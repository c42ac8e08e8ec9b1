#ifndef DESPAN_POINTS_HPP
#define DESPAN_POINTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "despan/error.hpp"

namespace despan {

/// n distinct points of [0,1)^d stored row-major, plus the factor that maps
/// normalized distances back to input units.
class PointSet {
 public:
  PointSet() = default;

  PointSet(unsigned dim, std::vector<double> coords, double scale = 1.0)
      : dim_(dim), coords_(std::move(coords)), scale_(scale) {
    require(dim_ >= 1, "point set: dimension must be >= 1");
    require(coords_.size() % dim_ == 0, "point set: coordinate count is not a multiple of d");
    require(scale_ > 0.0 && std::isfinite(scale_), "point set: scale must be positive");
    for (double c : coords_) {
      require(c >= 0.0 && c < 1.0, "point set: coordinates must lie in [0, 1)");
    }
    const std::vector<std::size_t> dups = duplicate_indices();
    if (!dups.empty()) {
      std::string msg = "point set: duplicate points at indices";
      for (std::size_t i : dups) msg += " " + std::to_string(i + 1);
      throw ValidationError(msg);
    }
  }

  unsigned dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  double scale() const noexcept { return scale_; }
  std::span<const double> coords() const noexcept { return coords_; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }

  // Normalized Euclidean distance.
  double distance(std::size_t a, std::size_t b) const noexcept { return euclidean((*this)[a], (*this)[b]); }

  // Index of a point with exactly these coordinates, or size() if absent.
  std::size_t find(std::span<const double> p) const noexcept {
    for (std::size_t i = 0; i < size(); ++i) {
      if (std::equal(p.begin(), p.end(), (*this)[i].begin(), (*this)[i].end())) return i;
    }
    return size();
  }

  static double euclidean(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  // 0-based indices of every point equal to some other point.
  std::vector<std::size_t> duplicate_indices() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
      const auto pa = (*this)[a];
      const auto pb = (*this)[b];
      return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      if (!less(order[i], order[i + 1])) {
        out.push_back(order[i]);
        out.push_back(order[i + 1]);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  unsigned dim_ = 0;
  std::vector<double> coords_;
  double scale_ = 1.0;
};

// Normalized coordinates are kept at most 1 - kNormalizeMargin.
inline constexpr double kNormalizeMargin = 0x1.0p-10;

/// Maps raw d-dimensional points (row-major) into [0, 1 - margin]^d.
/// Input already inside that box is kept as is with scale 1; otherwise the
/// bounding-box minimum is moved to the origin and everything is divided by
/// extent / (1 - margin), extent being the largest side of the box. Relative
/// distances change by that single factor, which becomes the scale.
inline PointSet normalize_points(unsigned dim, std::span<const double> raw) {
  require(dim >= 1, "normalize_points: dimension must be >= 1");
  require(raw.size() % dim == 0, "normalize_points: coordinate count is not a multiple of d");
  const std::size_t n = raw.size() / dim;
  require(n >= 2, "normalize_points: need at least two points");
  for (double c : raw) require(std::isfinite(c), "normalize_points: non-finite coordinate");

  const double top = 1.0 - kNormalizeMargin;
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], raw[i * dim + k]);
      hi[k] = std::max(hi[k], raw[i * dim + k]);
    }
  }
  bool inside = true;
  double extent = 0.0;
  for (unsigned k = 0; k < dim; ++k) {
    inside = inside && lo[k] >= 0.0 && hi[k] <= top;
    extent = std::max(extent, hi[k] - lo[k]);
  }
  require(extent > 0.0, "normalize_points: all points are identical");
  if (inside) return PointSet(dim, std::vector<double>(raw.begin(), raw.end()), 1.0);

  const double factor = top / extent;
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned k = 0; k < dim; ++k) {
      out[i * dim + k] = std::min(top, (raw[i * dim + k] - lo[k]) * factor);
    }
  }
  return PointSet(dim, std::move(out), extent / top);
}

}  // namespace despan

#endif  // DESPAN_POINTS_HPP
