#include "nlk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

void validate(int dimension, int n, const std::vector<Extent>& extents) {
  std::vector<std::string> problems;
  if (dimension != 1 && dimension != 2) {
    problems.push_back("grid.dimension: must be 1 or 2, got " + std::to_string(dimension));
  }
  if (n < 2) {
    problems.push_back("grid.nodes: must be >= 2, got " + std::to_string(n));
  }
  if ((dimension == 1 || dimension == 2) &&
      extents.size() != static_cast<std::size_t>(dimension)) {
    problems.push_back("grid.extents: expected " + std::to_string(dimension) +
                       " intervals, got " + std::to_string(extents.size()));
  }
  for (std::size_t k = 0; k < extents.size(); ++k) {
    const auto& e = extents[k];
    if (!std::isfinite(e.lo) || !std::isfinite(e.hi) || !(e.hi > e.lo)) {
      problems.push_back("grid.extents[" + std::to_string(k) +
                         "]: need finite lo < hi");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace

Grid::Grid(int dimension, int nodes_per_axis, std::vector<Extent> extents)
    : dimension_(dimension), n_(nodes_per_axis), extents_(std::move(extents)) {
  validate(dimension_, n_, extents_);

  double diam_sq = 0.0;
  for (int k = 0; k < dimension_; ++k) {
    const auto& e = extents_[static_cast<std::size_t>(k)];
    spacing_[static_cast<std::size_t>(k)] = e.length() / n_;
    cell_volume_ *= spacing_[static_cast<std::size_t>(k)];
    measure_ *= e.length();
    diam_sq += e.length() * e.length();
  }
  diameter_ = std::sqrt(diam_sq);

  const auto ax = [&](int axis, int idx) {
    const auto& e = extents_[static_cast<std::size_t>(axis)];
    return e.lo + (idx + 0.5) * spacing_[static_cast<std::size_t>(axis)];
  };

  if (dimension_ == 1) {
    nodes_.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) nodes_.push_back({ax(0, i), 0.0});
  } else {
    nodes_.reserve(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    for (int iy = 0; iy < n_; ++iy) {
      for (int ix = 0; ix < n_; ++ix) nodes_.push_back({ax(0, ix), ax(1, iy)});
    }
  }
}

double Grid::distance(std::size_t i, std::size_t j) const {
  const double dx = nodes_[i][0] - nodes_[j][0];
  const double dy = nodes_[i][1] - nodes_[j][1];
  return dimension_ == 1 ? std::abs(dx) : std::hypot(dx, dy);
}

std::uint64_t Grid::fingerprint() const {
  std::vector<unsigned char> bytes;
  const auto put = [&bytes](const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    bytes.insert(bytes.end(), c, c + len);
  };
  const std::int64_t d = dimension_;
  const std::int64_t n = n_;
  put(&d, sizeof d);
  put(&n, sizeof n);
  for (const auto& e : extents_) {
    put(&e.lo, sizeof e.lo);
    put(&e.hi, sizeof e.hi);
  }
  return fnv1a(bytes);
}

Grid build_grid(int dimension, int nodes_per_axis, std::vector<Extent> extents) {
  return Grid(dimension, nodes_per_axis, std::move(extents));
}

double poincare_domain_constant(const Grid& grid, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ParameterError("poincare_domain_constant: s must lie in (0,1)");
  }
  const double c = std::max(grid.diameter(), 1.0);
  return std::pow(c, grid.dimension() + 2.0 * s) / grid.measure();
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace nlk
