#include "nlk/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlk {

namespace {

constexpr double kRoundoff = 1e-12;

double linf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool is_continuum(const Trajectory& traj) {
  return traj.config.physics.model != ModelKind::Lattice;
}

InvariantCheck skipped(std::string name, std::string reason) {
  InvariantCheck c;
  c.name = std::move(name);
  c.applicable = false;
  c.reason = std::move(reason);
  return c;
}

}  // namespace

bool BoundReport::all_satisfied() const {
  return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return r.satisfied; });
}

const BoundRow* BoundReport::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

BoundReport uniform_bound_report(const Trajectory& traj) {
  BoundReport report;
  const auto& ph = traj.config.physics;
  const double k = ph.kappa;
  const double d = ph.delta;
  const double m = traj.initial_diameter;
  const bool singular = ph.model == ModelKind::Singular;
  const bool m_ok = m < std::numbers::pi;
  const double sinc_inv = m_ok ? 1.0 / c_m(m) : 0.0;

  const auto add = [&](std::string name, bool applicable, std::string reason, auto lhs_of,
                       double rhs) {
    BoundRow row;
    row.name = std::move(name);
    if (!is_continuum(traj)) {
      row.applicable = false;
      row.reason = "lattice model";
    } else if (traj.records.empty()) {
      row.applicable = false;
      row.reason = "no records";
    } else if (!applicable) {
      row.applicable = false;
      row.reason = std::move(reason);
    }
    if (!row.applicable) {
      report.rows.push_back(std::move(row));
      return;
    }
    row.rhs = rhs;
    row.lhs = -std::numeric_limits<double>::infinity();
    for (const auto& r : traj.records) {
      const double v = lhs_of(r);
      if (v > row.lhs) {
        row.lhs = v;
        row.worst_t = r.t;
      }
    }
    row.satisfied = row.lhs <= rhs * (1.0 + kRoundoff);
    report.rows.push_back(std::move(row));
  };

  const double in_sq = traj.records.empty() ? 0.0 : traj.records.front().seminorm_sq;
  const double in = std::sqrt(in_sq);

  add("seminorm_delta_bound", d > 0.0, "needs delta > 0",
      [](const DiagnosticsRecord& r) { return r.seminorm_sq; }, d > 0.0 ? (k + d) / d * in_sq : 0.0);
  add("seminorm_diameter_bound", singular && k > 0.0 && m_ok,
      "needs the singular model, kappa > 0 and M < pi",
      [](const DiagnosticsRecord& r) { return r.seminorm_sq; },
      k > 0.0 ? sinc_inv * sinc_inv * (k + d) / k * in_sq : 0.0);

  // Only the t = 0 record enters this row.
  {
    BoundRow row;
    row.name = "initial_potential_bound";
    if (!is_continuum(traj) || traj.records.empty()) {
      row.applicable = false;
      row.reason = traj.records.empty() ? "no records" : "lattice model";
    } else {
      row.lhs = traj.records.front().e_potential;
      row.rhs = 0.25 * k * in_sq;
      row.satisfied = row.lhs <= row.rhs * (1.0 + kRoundoff);
    }
    report.rows.push_back(std::move(row));
  }

  add("energy_bound", true, "", [](const DiagnosticsRecord& r) { return r.energy(); },
      0.25 * (k + d) * in_sq);
  add("sin_seminorm_bound", k > 0.0, "needs kappa > 0",
      [](const DiagnosticsRecord& r) { return r.sin_seminorm_sq; },
      k > 0.0 ? (k + d) / k * in_sq : 0.0);
  add("dual_bound_delta", d > 0.0 && m_ok, "needs delta > 0 and M < pi",
      [](const DiagnosticsRecord& r) { return r.dual_bound; },
      d > 0.0 ? 0.5 * (k + d) * std::sqrt((k + d) / d) * in : 0.0);
  add("dual_bound_diameter", singular && k > 0.0 && m_ok,
      "needs the singular model, kappa > 0 and M < pi",
      [](const DiagnosticsRecord& r) { return r.dual_bound; },
      k > 0.0 ? (0.5 * k + 0.5 * d * sinc_inv) * std::sqrt((k + d) / k) * in : 0.0);
  return report;
}

double energy_identity_residual(const Trajectory& traj) {
  if (traj.records.empty()) return 0.0;
  const double e0 = traj.records.front().energy();
  double worst = 0.0;
  for (const auto& r : traj.records) {
    worst = std::max(worst, std::abs(r.energy() + r.dissipation - e0));
  }
  return worst;
}

double energy_identity_relative(const Trajectory& traj) {
  if (traj.records.empty()) return 0.0;
  const double e0 = traj.records.front().energy();
  const double res = energy_identity_residual(traj);
  if (e0 == 0.0) return res;
  return res / e0;
}

InvariantCheck check_mean_conservation(const Trajectory& traj, double tol) {
  if (!is_continuum(traj)) return skipped("mean_conservation", "lattice model is not gauge-reduced");
  InvariantCheck c;
  c.name = "mean_conservation";
  c.tolerance = tol;
  if (traj.records.empty()) return c;
  const double m0 = traj.records.front().mean;
  for (const auto& r : traj.records) c.value = std::max(c.value, std::abs(r.mean - m0));
  c.passed = c.value <= tol;
  return c;
}

InvariantCheck check_diameter_monotone(const Trajectory& traj, double tol_per_time) {
  if (!(traj.initial_diameter < std::numbers::pi)) {
    return skipped("diameter_monotone", "needs D[theta_in] < pi");
  }
  if (!traj.config.physics.nu_values.empty()) {
    return skipped("diameter_monotone", "needs a constant natural frequency");
  }
  InvariantCheck c;
  c.name = "diameter_monotone";
  c.tolerance = tol_per_time;
  const auto& rs = traj.records;
  for (std::size_t k = 1; k < rs.size(); ++k) {
    const double dt = rs[k].t - rs[k - 1].t;
    const double growth = rs[k].diameter - rs[k - 1].diameter;
    // value: largest growth rate per unit time
    if (dt > 0.0) c.value = std::max(c.value, growth / dt);
    if (growth > tol_per_time * dt) c.passed = false;
  }
  if (!rs.empty() && rs.back().diameter > rs.front().diameter + tol_per_time * rs.back().t) {
    c.passed = false;
  }
  return c;
}

InvariantCheck check_truncation(const Trajectory& traj, double tol) {
  const auto& ph = traj.config.physics;
  if (!is_continuum(traj) && (ph.nu != 0.0 || !ph.nu_values.empty())) {
    return skipped("truncation_decay", "lattice run with drift");
  }
  InvariantCheck c;
  c.name = "truncation_decay";
  c.tolerance = tol;
  if (traj.snapshots.empty()) return c;
  const auto& first = traj.snapshots.front().values;
  const double hi = *std::max_element(first.begin(), first.end());
  const double lo = *std::min_element(first.begin(), first.end());
  double w = 1.0;
  for (const auto& e : traj.config.grid.extents) w *= e.length() / traj.config.grid.nodes;
  for (const auto& s : traj.snapshots) {
    c.value = std::max(c.value, truncation_excess_sq(s.values, hi, true, w));
    c.value = std::max(c.value, truncation_excess_sq(s.values, lo, false, w));
  }
  c.passed = c.value <= tol;
  return c;
}

InvariantCheck check_energy_monotone(const Trajectory& traj, double rel_tol) {
  if (!is_continuum(traj)) return skipped("energy_monotone", "lattice model");
  InvariantCheck c;
  c.name = "energy_monotone";
  const auto& rs = traj.records;
  if (rs.empty()) return c;
  c.tolerance = rel_tol * rs.front().energy();
  for (std::size_t k = 1; k < rs.size(); ++k) {
    c.value = std::max(c.value, rs[k].energy() - rs[k - 1].energy());
  }
  c.passed = c.value <= c.tolerance;
  return c;
}

InvariantCheck check_energy_identity(const Trajectory& traj, double rel_tol) {
  if (!is_continuum(traj)) return skipped("energy_identity", "lattice model");
  InvariantCheck c;
  c.name = "energy_identity";
  c.tolerance = rel_tol;
  c.value = energy_identity_relative(traj);
  c.passed = c.value <= rel_tol;
  return c;
}

InvariantCheck check_contraction(const Trajectory& traj, double tol) {
  if (traj.config.physics.kappa != 0.0) return skipped("contraction", "needs kappa = 0");
  if (!is_continuum(traj)) return skipped("contraction", "lattice model");
  InvariantCheck c;
  c.name = "contraction";
  c.tolerance = tol;
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const auto& a = traj.snapshots[k - 1].values;
    const auto& b = traj.snapshots[k].values;
    const double l2 = std::sqrt(l2_norm_sq(b, 1.0)) - std::sqrt(l2_norm_sq(a, 1.0));
    const double li = linf(b) - linf(a);
    c.value = std::max({c.value, l2, li});
  }
  c.passed = c.value <= tol;
  return c;
}

InvariantCheck check_relaxation_bound(const Trajectory& traj, double rate, double tol) {
  InvariantCheck c;
  c.name = "relaxation_bound";
  c.tolerance = tol;
  if (traj.records.empty()) return c;
  const double d0 = traj.records.front().dist_sq;
  // value: worst ratio dist_sq(t) / (dist_sq(0) exp(-rate t))
  for (const auto& r : traj.records) {
    const double envelope = d0 * std::exp(-rate * r.t);
    if (envelope > 0.0) {
      c.value = std::max(c.value, r.dist_sq / envelope);
    } else if (r.dist_sq > 0.0) {
      c.value = std::numeric_limits<double>::infinity();
    }
    if (r.dist_sq > envelope * (1.0 + tol)) c.passed = false;
  }
  return c;
}

InvariantCheck check_uniform_bounds(const Trajectory& traj) {
  if (!is_continuum(traj)) return skipped("uniform_bounds", "lattice model");
  const auto report = uniform_bound_report(traj);
  InvariantCheck c;
  c.name = "uniform_bounds";
  c.passed = report.all_satisfied();
  for (const auto& r : report.rows) {
    if (r.applicable && r.rhs > 0.0) c.value = std::max(c.value, r.lhs / r.rhs);
  }
  c.tolerance = 1.0;
  return c;
}

}  // namespace nlk
