#include "nlk/initial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

// Affine map of `v` onto [-m/2, m/2]; leaves a constant vector at zero.
void rescale_to_diameter(std::vector<double>& v, double m) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double a = *lo;
  const double span = *hi - a;
  if (span <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = m * ((x - a) / span) - 0.5 * m;
}

}  // namespace

std::vector<double> make_initial_condition(const Grid& grid, const InitialConfig& initial) {
  const std::size_t n = grid.size();
  const double m = initial.diameter;
  std::vector<double> theta(n, 0.0);

  switch (initial.kind) {
    case InitialKind::Constant:
      break;
    case InitialKind::Smooth: {
      const Extent e = grid.extents()[0];
      for (std::size_t i = 0; i < n; ++i) {
        const double x = (grid.node(i)[0] - e.lo) / e.length();
        theta[i] = std::sin(2.0 * std::numbers::pi * x);
      }
      rescale_to_diameter(theta, m);
      break;
    }
    case InitialKind::Random: {
      if (!initial.seed) throw ConfigError("initial.seed: required when kind = random");
      std::mt19937_64 rng(*initial.seed);
      std::uniform_real_distribution<double> dist(-0.5 * m, 0.5 * m);
      for (double& x : theta) x = dist(rng);
      rescale_to_diameter(theta, m);
      break;
    }
    case InitialKind::TwoCluster: {
      const Extent e = grid.extents()[0];
      const double mid = 0.5 * (e.lo + e.hi);
      for (std::size_t i = 0; i < n; ++i) theta[i] = grid.node(i)[0] < mid ? 0.5 * m : -0.5 * m;
      break;
    }
  }
  for (double& x : theta) x += initial.offset;
  return theta;
}

}  // namespace nlk
