#pragma once

#include <string>
#include <vector>

#include "nlk/integrate.hpp"

namespace nlk {

/// One row of the uniform-bound table. `lhs` is the worst value over the
/// recorded times.
struct BoundRow {
  std::string name;
  bool applicable = true;
  std::string reason;  ///< why the row was skipped
  double lhs = 0.0;
  double rhs = 0.0;
  double worst_t = 0.0;
  bool satisfied = true;
};

struct BoundReport {
  std::vector<BoundRow> rows;

  bool all_satisfied() const;
  const BoundRow* find(const std::string& name) const;
};

/// Evaluates the a priori bounds of the continuum models at every record:
///  seminorm_delta_bound     [theta]^2 <= ((k+d)/d) [theta_in]^2             (delta > 0)
///  seminorm_diameter_bound  [theta]^2 <= (M/sin M)^2 ((k+d)/k) [theta_in]^2 (singular, k > 0, M < pi)
///  initial_potential_bound  E_P(theta_in) <= (k/4) [theta_in]^2
///  energy_bound             E_P + E_K <= ((k+d)/4) [theta_in]^2
///  sin_seminorm_bound       sum C w sin^2 <= ((k+d)/k) [theta_in]^2          (k > 0)
///  dual_bound_delta         B <= ((k+d)/2) ((k+d)/d)^(1/2) [theta_in]       (delta > 0, M < pi)
///  dual_bound_diameter      B <= (k/2 + (d/2) M/sin M) ((k+d)/k)^(1/2) [theta_in]
///                                                                          (singular, k > 0, M < pi)
/// Every row allows a relative round-off slack of 1e-12.
/// Lattice runs get every row skipped.
BoundReport uniform_bound_report(const Trajectory& traj);

/// max_t |E(t) + D(t) - E(0)|
double energy_identity_residual(const Trajectory& traj);
/// energy_identity_residual / E(0); 0 when E(0) = 0.
double energy_identity_relative(const Trajectory& traj);

struct InvariantCheck {
  std::string name;
  bool applicable = true;
  std::string reason;
  double value = 0.0;      ///< worst observed quantity
  double tolerance = 0.0;
  bool passed = true;
};

/// max_t |mean(t) - mean(0)| <= tol
InvariantCheck check_mean_conservation(const Trajectory& traj, double tol = 1e-10);
/// D(t_{k+1}) - D(t_k) <= tol (t_{k+1} - t_k), and D(T) <= D(0) + tol T
InvariantCheck check_diameter_monotone(const Trajectory& traj, double tol_per_time = 1e-8);
/// ||(theta - max theta_in)_+||^2 and ||(min theta_in - theta)_+||^2 <= tol
InvariantCheck check_truncation(const Trajectory& traj, double tol = 1e-16);
/// E(t_{k+1}) <= E(t_k) + tol E(0)
InvariantCheck check_energy_monotone(const Trajectory& traj, double rel_tol = 1e-10);
/// |E + D - E(0)| / E(0) <= tol
InvariantCheck check_energy_identity(const Trajectory& traj, double rel_tol = 1e-4);
/// kappa = 0 only: ||theta||_{L2} and ||theta||_inf nonincreasing within tol between records.
InvariantCheck check_contraction(const Trajectory& traj, double tol = 1e-10);
/// dist_sq(t) <= dist_sq(0) exp(-rate t) (1 + tol) with the given rate.
InvariantCheck check_relaxation_bound(const Trajectory& traj, double rate, double tol = 1e-2);
InvariantCheck check_uniform_bounds(const Trajectory& traj);

}  // namespace nlk
