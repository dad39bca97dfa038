#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlk/integrate.hpp"
#include "nlk/invariants.hpp"

namespace nlk {

struct RungResult {
  double value = 0.0;  ///< epsilon or delta of this rung
  SimConfig config;
  std::uint64_t config_hash = 0;
  Trajectory trajectory;
  BoundReport bounds;
  bool bound_ok = true;  ///< the sweep's own uniform bound held on every record
};

struct SweepResult {
  std::string parameter;  ///< "epsilon" or "delta"
  std::vector<double> ladder;
  std::vector<RungResult> rungs;
  /// deltas[j] = max_t ||theta_j(t) - theta_{j+1}(t)||_{L2}
  std::vector<double> deltas;
  double dt = 0.0;
  int stride = 1;

  bool deltas_decreasing() const;  ///< strictly
  bool bounds_ok() const;
};

/// Runs rungs concurrently on at most `workers` threads (0 = hardware
/// concurrency). Every rung shares the grid, seed, stride and one fixed dt:
/// the smallest auto dt over the ladder when the base config is in auto mode.
/// Throws ParameterError on a ladder that is not strictly decreasing, and
/// BlowUpError naming the rung when any rung blows up.
SweepResult sweep_epsilon(const SimConfig& base, const std::vector<double>& ladder,
                          unsigned workers = 0);

/// Singular kernel in the sine term, delta taken from the ladder. Throws
/// ConfigError when D[theta_in] >= pi.
SweepResult sweep_delta(const SimConfig& base, const std::vector<double>& ladder,
                        unsigned workers = 0);

/// sqrt(sum w (a_i - b_i)^2)
double l2_distance(std::span<const double> a, std::span<const double> b, double w);

struct RelaxationReport {
  double m = 0.0;             ///< D[theta_in]
  double c_m = 0.0;           ///< sin M / M
  double lambda_star = 0.0;   ///< sharp discrete Poincare constant
  double c_p_domain = 0.0;    ///< analytic domain constant (reciprocal orientation)
  double certified_rate = 0.0;  ///< kappa c_M lambda_star
  DecayFit fit;
  double worst_ratio = 0.0;  ///< max_t dist_sq(t) / (dist_sq(0) exp(-rate t))
  bool bound_satisfied = true;
  bool rate_satisfied = true;  ///< fit.rate >= certified_rate (trivially true when dist_sq(0) = 0)
  Trajectory trajectory;
};

/// Singular dynamics with delta = 0 (the model fields of `config` are
/// overridden). Throws ConfigError when kappa = 0, D[theta_in] >= pi or the
/// frequency is not constant.
RelaxationReport relaxation_experiment(const SimConfig& config, double tol = 1e-2);

struct RefinementRow {
  int nodes = 0;
  double dt = 0.0;
  double energy_residual = 0.0;  ///< relative
  /// Coarse-restricted L2 distance of the final state to the next finer row;
  /// NaN on the last row.
  double diff_to_next = 0.0;
};

struct RefinementTable {
  std::vector<RefinementRow> rows;
  double residual_coarse_dt = 0.0;  ///< base run at its own dt
  double residual_half_dt = 0.0;    ///< same run at dt / 2
  double dt_halving_ratio = 0.0;
};

/// Piecewise-constant average of `fine` onto a grid with `coarse_nodes` per
/// axis. `fine_nodes` must be a multiple of `coarse_nodes`.
std::vector<double> restrict_to_coarse(std::span<const double> fine, int dimension,
                                       int fine_nodes, int coarse_nodes);

/// Runs `base` for each node count in `nodes` (increasing, each a multiple of
/// the first) and a dt-halving pair at base.grid.nodes.
RefinementTable refinement_study(const SimConfig& base, const std::vector<int>& nodes);

}  // namespace nlk
