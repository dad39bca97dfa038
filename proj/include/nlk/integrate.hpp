#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlk/config.hpp"
#include "nlk/diagnostics.hpp"
#include "nlk/dynamics.hpp"
#include "nlk/kernel.hpp"

namespace nlk {

using RhsFunction = std::function<void(std::span<const double>, std::span<double>)>;

struct GaugeReduction {
  PhaseField reduced;  ///< theta_in - mean, discrete mean zero
  double mean = 0.0;   ///< (1/|Omega|) sum w theta_in
};

/// Removes the initial mean phase. The physical field is recovered as
/// reduced(t) + mean + nu t. `nu` must be a single constant.
GaugeReduction gauge_reduce(const PhaseField& theta_in, const Grid& grid, double nu);

/// One-sided Lipschitz bound of the discrete right-hand side:
/// 2 kappa max_i r_i(coupling) + 2 delta max_i r_i(w_sing).
double stiffness_bound(const KernelMatrix& coupling, const KernelMatrix& w_sing, double kappa,
                       double delta);

/// safety / stiffness_bound, or safety * fallback_horizon when the bound is
/// zero (free drift).
double select_dt(const KernelMatrix& coupling, const KernelMatrix& w_sing, double kappa,
                 double delta, double safety, double fallback_horizon);

/// Explicit stepper with reusable workspace. `advance` also returns the
/// increment of the dissipation integral int ||rhs||^2_{L2} dt computed with
/// the scheme's own quadrature weights, i.e. the scheme applied to the
/// augmented system D' = ||rhs(theta)||^2.
class Stepper {
 public:
  Stepper(RhsFunction rhs, std::size_t n, Scheme scheme, double l2_weight);

  /// Throws BlowUpError (theta left at the last finite state) when the step
  /// produces NaN or Inf.
  double advance(std::vector<double>& theta, double t, double dt);

 private:
  RhsFunction rhs_;
  Scheme scheme_;
  double w_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, next_;
};

/// Single explicit step of `theta` (time stamp advanced by dt).
PhaseField step(const PhaseField& theta, const RhsFunction& rhs, double dt, Scheme scheme);

/// Grid, kernel matrices and right-hand side for one configuration. Cheap to
/// copy; matrices are shared.
class Model {
 public:
  /// `shared_singular` lets sweeps reuse one assembled singular matrix.
  static Model build(const SimConfig& config,
                     std::shared_ptr<const KernelMatrix> shared_singular = nullptr);

  ModelKind kind() const { return kind_; }
  const Grid& grid() const { return *grid_; }
  const KernelMatrix& singular() const { return *singular_; }
  std::shared_ptr<const KernelMatrix> singular_ptr() const { return singular_; }
  /// Kernel of the sine term: truncated for the regularized model, singular
  /// otherwise.
  const KernelMatrix& coupling() const { return truncated_ ? *truncated_ : *singular_; }
  const ModelParams& params() const { return params_; }

  /// Gauge-frame right-hand side for the continuum models (nu dropped);
  /// full lattice right-hand side including per-node nu.
  void rhs(std::span<const double> theta, std::span<double> rate) const;
  RhsFunction rhs_function() const;

  double stiffness() const;
  DiagnosticsContext diagnostics_context(double diameter_bound) const;

 private:
  ModelKind kind_ = ModelKind::Regularized;
  ModelParams params_;
  std::shared_ptr<const Grid> grid_;
  std::shared_ptr<const KernelMatrix> singular_;
  std::shared_ptr<const KernelMatrix> truncated_;
  std::shared_ptr<const SymmetricMatrix> lattice_;  ///< raw psi, lattice model only
  std::vector<double> nu_nodes_;
};

enum class TerminationStatus { Completed, BlowUp, Aborted };

std::string to_string(TerminationStatus s);

struct Trajectory {
  SimConfig config;
  /// States in the evolving frame: gauge-reduced for the continuum models,
  /// physical for the lattice model.
  std::vector<PhaseField> snapshots;
  std::vector<DiagnosticsRecord> records;
  bool gauge_reduced = false;
  double mean_offset = 0.0;  ///< initial mean removed by the gauge
  double nu = 0.0;           ///< drift removed by the gauge
  double initial_diameter = 0.0;
  double dt = 0.0;
  std::size_t steps_planned = 0;
  std::size_t steps_taken = 0;
  TerminationStatus status = TerminationStatus::Completed;
  std::string message;
  double wall_seconds = 0.0;

  /// Snapshot k with the gauge shift mean + nu t reapplied.
  PhaseField physical(std::size_t k) const;
};

/// Integrates the configured model over [0, T]. A blow-up ends the run early
/// with status BlowUp and the records up to the last finite state.
Trajectory simulate(const SimConfig& config);
Trajectory simulate(const SimConfig& config, const Model& model);

/// dt actually used for `config` on `model` (auto or fixed), before rounding
/// to land on T.
double planned_dt(const SimConfig& config, const Model& model);

}  // namespace nlk
