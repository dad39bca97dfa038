#include "nlk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

void check_sizes(std::size_t n, std::size_t m, std::size_t k, const char* who) {
  if (n != m || n != k) {
    throw ContractError(std::string(who) + ": size mismatch (" + std::to_string(n) + ", " +
                        std::to_string(m) + ", " + std::to_string(k) + ")");
  }
}

void require_singular(const KernelMatrix& w, const char* who) {
  if (w.variant() != KernelVariant::Singular) {
    throw ContractError(std::string(who) + ": expected the singular kernel matrix");
  }
}

}  // namespace

void rhs_singular(std::span<const double> theta, const KernelMatrix& w_sing, double kappa,
                  std::span<double> rate) {
  require_singular(w_sing, "rhs_singular");
  check_sizes(theta.size(), w_sing.size(), rate.size(), "rhs_singular");
  const std::size_t n = theta.size();
  std::fill(rate.begin(), rate.end(), 0.0);
  // Each unordered pair is visited once; the sine term is odd in the pair.
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = w_sing.row(i);
    const double ti = theta[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = row[j] * std::sin(theta[j] - ti);
      acc += c;
      rate[j] -= c;
    }
    rate[i] += acc;
  }
  for (double& r : rate) r *= kappa;
}

void rhs_regularized(std::span<const double> theta, const KernelMatrix& coupling,
                     const KernelMatrix& w_sing, double kappa, double delta,
                     std::span<double> rate) {
  require_singular(w_sing, "rhs_regularized");
  check_sizes(theta.size(), coupling.size(), rate.size(), "rhs_regularized");
  check_sizes(theta.size(), w_sing.size(), rate.size(), "rhs_regularized");
  if (coupling.grid_fingerprint() != w_sing.grid_fingerprint()) {
    throw ContractError("rhs_regularized: kernel matrices built on different grids");
  }
  const std::size_t n = theta.size();
  std::fill(rate.begin(), rate.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto crow = coupling.row(i);
    const auto srow = w_sing.row(i);
    const double ti = theta[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = theta[j] - ti;
      const double c = kappa * crow[j] * std::sin(diff) + delta * srow[j] * diff;
      acc += c;
      rate[j] -= c;
    }
    rate[i] += acc;
  }
}

void rhs_lattice(std::span<const double> theta, const SymmetricMatrix& weights, double kappa,
                 std::span<const double> nu, std::span<double> rate) {
  check_sizes(theta.size(), weights.size(), rate.size(), "rhs_lattice");
  check_sizes(theta.size(), nu.size(), rate.size(), "rhs_lattice");
  const std::size_t n = theta.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0) throw ContractError("rhs_lattice: weights need a zero diagonal");
  }
  std::fill(rate.begin(), rate.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = weights.row(i);
    const double ti = theta[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = row[j] * std::sin(theta[j] - ti);
      acc += c;
      rate[j] -= c;
    }
    rate[i] += acc;
  }
  const double scale = kappa / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) rate[i] = nu[i] + scale * rate[i];
}

double bilinear_form(std::span<const double> u, std::span<const double> v,
                     const KernelMatrix& w_sing) {
  check_sizes(u.size(), v.size(), w_sing.size(), "bilinear_form");
  const std::size_t n = u.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = w_sing.row(i);
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) acc += row[j] * (u[i] - u[j]) * (v[i] - v[j]);
    total += acc;
  }
  return total * w_sing.cell_volume();
}

}  // namespace nlk
