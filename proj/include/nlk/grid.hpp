#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nlk {

struct Extent {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
};

using Point = std::array<double, 2>;

/// Cell-centred uniform lattice on an axis-aligned box in one or two
/// dimensions. Node i sits at the midpoint of its cell; in 2D the x index runs
/// fastest (i = ix + n * iy). Immutable after construction.
class Grid {
 public:
  Grid(int dimension, int nodes_per_axis, std::vector<Extent> extents);

  int dimension() const { return dimension_; }
  int nodes_per_axis() const { return n_; }
  std::size_t size() const { return nodes_.size(); }

  std::span<const Extent> extents() const { return extents_; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

  /// Uniform quadrature weight (cell volume).
  double cell_volume() const { return cell_volume_; }
  /// |Omega|
  double measure() const { return measure_; }
  /// Euclidean diameter of the box.
  double diameter() const { return diameter_; }

  const Point& node(std::size_t i) const { return nodes_[i]; }
  double distance(std::size_t i, std::size_t j) const;

  /// Stable 64-bit hash of (d, n, extents); used to key kernel caches.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.fingerprint() == b.fingerprint();
  }

 private:
  int dimension_;
  int n_;
  std::vector<Extent> extents_;
  std::array<double, 2> spacing_{0.0, 0.0};
  double cell_volume_ = 1.0;
  double measure_ = 1.0;
  double diameter_ = 0.0;
  std::vector<Point> nodes_;
};

/// Throws ConfigError on d outside {1,2}, n < 2, a wrong number of extents or
/// an empty extent.
Grid build_grid(int dimension, int nodes_per_axis, std::vector<Extent> extents);

/// max{diam, 1}^(d+2s) / |Omega|: the constant C with ||u||^2 <= C [u]^2 for
/// mean-zero u, from the elementary diameter argument.
double poincare_domain_constant(const Grid& grid, double s);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace nlk
