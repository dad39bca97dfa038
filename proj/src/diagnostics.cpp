#include "nlk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

void check_size(std::size_t a, std::size_t b, const char* who) {
  if (a != b) throw ContractError(std::string(who) + ": field and kernel sizes differ");
}

// sum_{i<j} W_ij f(theta_i - theta_j); callers double it for the full sum.
template <class F>
double pair_sum(std::span<const double> theta, const KernelMatrix& w, F f) {
  const std::size_t n = theta.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) acc += row[j] * f(theta[i] - theta[j]);
    total += acc;
  }
  return total;
}

}  // namespace

double diameter(std::span<const double> theta) {
  if (theta.empty()) throw ContractError("diameter: empty field");
  const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
  return *hi - *lo;
}

double mean_phase(std::span<const double> theta, const Grid& grid) {
  check_size(theta.size(), grid.size(), "mean_phase");
  double acc = 0.0;
  for (double v : theta) acc += v;
  return acc * grid.cell_volume() / grid.measure();
}

double l2_norm_sq(std::span<const double> theta, double w) {
  double acc = 0.0;
  for (double v : theta) acc += v * v;
  return acc * w;
}

double dist_sq(std::span<const double> theta, const Grid& grid) {
  const double m = mean_phase(theta, grid);
  double acc = 0.0;
  for (double v : theta) acc += (v - m) * (v - m);
  return acc * grid.cell_volume();
}

double energy_potential(std::span<const double> theta, const KernelMatrix& w, double kappa) {
  check_size(theta.size(), w.size(), "energy_potential");
  const double s = pair_sum(theta, w, [](double d) {
    const double h = std::sin(0.5 * d);
    return 2.0 * h * h;
  });
  return kappa * s * w.cell_volume();
}

double seminorm_sq(std::span<const double> theta, const KernelMatrix& w_sing) {
  check_size(theta.size(), w_sing.size(), "seminorm_sq");
  return 2.0 * pair_sum(theta, w_sing, [](double d) { return d * d; }) * w_sing.cell_volume();
}

double energy_kinetic(std::span<const double> theta, const KernelMatrix& w_sing, double delta) {
  if (delta == 0.0) return 0.0;
  return 0.25 * delta * seminorm_sq(theta, w_sing);
}

double sin_seminorm_sq(std::span<const double> theta, const KernelMatrix& w) {
  check_size(theta.size(), w.size(), "sin_seminorm_sq");
  return 2.0 *
         pair_sum(theta, w,
                  [](double d) {
                    const double sd = std::sin(d);
                    return sd * sd;
                  }) *
         w.cell_volume();
}

double dual_bound_value(std::span<const double> theta, const KernelMatrix& coupling,
                        const KernelMatrix& w_sing, double kappa, double delta, double m) {
  if (!(m < std::numbers::pi)) {
    throw ParameterError("dual_bound_value: diameter bound M must be < pi");
  }
  const double sin_part = kappa == 0.0 ? 0.0 : std::sqrt(sin_seminorm_sq(theta, coupling));
  const double lin_part = delta == 0.0 ? 0.0 : std::sqrt(seminorm_sq(theta, w_sing));
  return 0.5 * kappa * sin_part + 0.5 * delta * lin_part;
}

double c_m(double m) {
  if (!(m >= 0.0 && m < std::numbers::pi)) {
    throw ParameterError("c_M: diameter M must lie in [0, pi)");
  }
  if (m == 0.0) return 1.0;
  return std::sin(m) / m;
}

double truncation_excess_sq(std::span<const double> theta, double k, bool upper, double w) {
  double acc = 0.0;
  for (double v : theta) {
    const double e = upper ? v - k : k - v;
    if (e > 0.0) acc += e * e;
  }
  return acc * w;
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y,
                        double transient_fraction, double floor) {
  if (t.size() != y.size()) throw ContractError("fit_decay_rate: t and y differ in length");
  if (t.empty()) throw NumericalError("fit_decay_rate: empty series");
  const double t_cut = transient_fraction * t.back();

  std::vector<double> xs;
  std::vector<double> ls;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(y[k] > 0.0) || !std::isfinite(y[k])) {
      throw NumericalError("fit_decay_rate: nonpositive value at t=" + std::to_string(t[k]));
    }
    if (y[k] < floor) break;
    if (t[k] < t_cut) continue;
    xs.push_back(t[k]);
    ls.push_back(-std::log(y[k]));
  }
  if (xs.size() < 2) throw NumericalError("fit_decay_rate: fewer than two points in window");

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ls.begin(), ls.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ls[k] - my);
  }
  if (sxx == 0.0) throw NumericalError("fit_decay_rate: degenerate time window");
  DecayFit fit;
  fit.rate = sxy / sxx;
  const double intercept = my - fit.rate * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = ls[k] - (intercept + fit.rate * xs[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = xs.size();
  return fit;
}

DiagnosticsRecord observe(std::span<const double> theta, double t, double dissipation,
                          const DiagnosticsContext& ctx) {
  DiagnosticsRecord r;
  r.t = t;
  r.mean = mean_phase(theta, *ctx.grid);
  r.diameter = diameter(theta);
  r.e_potential = energy_potential(theta, *ctx.coupling, ctx.kappa);
  r.seminorm_sq = seminorm_sq(theta, *ctx.dissipation);
  r.e_kinetic = 0.25 * ctx.delta * r.seminorm_sq;
  r.dist_sq = dist_sq(theta, *ctx.grid);
  r.dissipation = dissipation;
  r.sin_seminorm_sq = sin_seminorm_sq(theta, *ctx.coupling);
  if (ctx.diameter_bound < std::numbers::pi) {
    r.dual_bound = 0.5 * ctx.kappa * std::sqrt(r.sin_seminorm_sq) +
                   0.5 * ctx.delta * std::sqrt(r.seminorm_sq);
  } else {
    r.dual_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace nlk
