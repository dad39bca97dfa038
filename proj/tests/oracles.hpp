#pragma once

// Independent reference implementations used only by the tests. They are
// written directly from the formulas with full double loops and no shared
// helpers from the library, so a bug in the library code does not leak into
// the expected values.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

struct Box {
  int d = 1;
  int n = 4;
  double lo[2] = {0.0, 0.0};
  double hi[2] = {1.0, 1.0};

  std::size_t size() const { return d == 1 ? std::size_t(n) : std::size_t(n) * n; }
  double h(int k) const { return (hi[k] - lo[k]) / n; }
  double w() const { return d == 1 ? h(0) : h(0) * h(1); }
  double measure() const {
    return d == 1 ? hi[0] - lo[0] : (hi[0] - lo[0]) * (hi[1] - lo[1]);
  }
  std::vector<double> x(std::size_t i) const {
    if (d == 1) return {lo[0] + (double(i) + 0.5) * h(0)};
    const std::size_t ix = i % std::size_t(n);
    const std::size_t iy = i / std::size_t(n);
    return {lo[0] + (double(ix) + 0.5) * h(0), lo[1] + (double(iy) + 0.5) * h(1)};
  }
  double dist(std::size_t i, std::size_t j) const {
    const auto a = x(i);
    const auto b = x(j);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  }
};

/// Full N x N weighted matrix psi(r) w (eps = 0) or (r+eps)^-(d+2s) w, zero diagonal.
inline std::vector<std::vector<double>> weights(const Box& b, double s, double eps) {
  const std::size_t n = b.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      m[i][j] = std::pow(b.dist(i, j) + eps, -(b.d + 2.0 * s)) * b.w();
    }
  }
  return m;
}

using Mat = std::vector<std::vector<double>>;

inline std::vector<double> rhs_regularized(const std::vector<double>& th, const Mat& c,
                                           const Mat& sm, double kappa, double delta) {
  std::vector<double> r(th.size(), 0.0);
  for (std::size_t i = 0; i < th.size(); ++i) {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t j = 0; j < th.size(); ++j) {
      a += c[i][j] * std::sin(th[j] - th[i]);
      b += sm[i][j] * (th[i] - th[j]);
    }
    r[i] = kappa * a - delta * b;
  }
  return r;
}

inline std::vector<double> rhs_singular(const std::vector<double>& th, const Mat& sm,
                                        double kappa) {
  return rhs_regularized(th, sm, sm, kappa, 0.0);
}

/// psi without quadrature weight; kappa / N normalisation.
inline std::vector<double> rhs_lattice(const std::vector<double>& th, const Mat& psi,
                                       double kappa, const std::vector<double>& nu) {
  std::vector<double> r(th.size(), 0.0);
  const double n = double(th.size());
  for (std::size_t a = 0; a < th.size(); ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < th.size(); ++b) acc += psi[a][b] * std::sin(th[b] - th[a]);
    r[a] = nu[a] + kappa / n * acc;
  }
  return r;
}

inline double energy_potential(const std::vector<double>& th, const Mat& m, double w,
                               double kappa) {
  double acc = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    for (std::size_t j = 0; j < th.size(); ++j) acc += m[i][j] * w * (1.0 - std::cos(th[i] - th[j]));
  }
  return 0.5 * kappa * acc;
}

inline double seminorm_sq(const std::vector<double>& th, const Mat& m, double w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    for (std::size_t j = 0; j < th.size(); ++j) acc += m[i][j] * w * std::pow(th[i] - th[j], 2);
  }
  return acc;
}

inline double sin_seminorm_sq(const std::vector<double>& th, const Mat& m, double w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    for (std::size_t j = 0; j < th.size(); ++j) acc += m[i][j] * w * std::pow(std::sin(th[i] - th[j]), 2);
  }
  return acc;
}

inline double diameter(std::vector<double> th) {
  std::sort(th.begin(), th.end());
  return th.back() - th.front();
}

/// 2 * second smallest eigenvalue of diag(rowsum) - W from a dense
/// full-spectrum solve.
inline double lambda_star_dense(const Mat& m) {
  const auto n = Eigen::Index(m.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      lap(i, j) = -m[std::size_t(i)][std::size_t(j)];
      r += m[std::size_t(i)][std::size_t(j)];
    }
    lap(i, i) = r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  return 2.0 * es.eigenvalues()(1);
}

/// max_i sum_j psi_eps^2 w and max_i sum_j psi_eps w, j = i included.
inline std::pair<double, double> lipschitz(const Box& b, double s, double eps) {
  double k = 0.0;
  double ks = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double a = 0.0;
    double c = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double p = std::pow(b.dist(i, j) + eps, -(b.d + 2.0 * s));
      a += p * p * b.w();
      c += p * b.w();
    }
    k = std::max(k, a);
    ks = std::max(ks, c);
  }
  return {k, ks};
}

/// Forward Euler with a fixed number of steps.
template <class F>
std::vector<double> euler(std::vector<double> th, F rhs, double t_end, int steps) {
  const double dt = t_end / steps;
  for (int k = 0; k < steps; ++k) {
    const auto r = rhs(th);
    for (std::size_t i = 0; i < th.size(); ++i) th[i] += dt * r[i];
  }
  return th;
}

/// phi' = -2 kappa W12 sin(phi): tan(phi/2) = tan(phi0/2) exp(-2 kappa W12 t).
inline double two_oscillator_phase(double phi0, double kappa, double w12, double t) {
  return 2.0 * std::atan(std::tan(0.5 * phi0) * std::exp(-2.0 * kappa * w12 * t));
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return scale == 0.0 ? diff : diff / scale;
}

}  // namespace oracle
