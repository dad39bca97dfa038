#pragma once

#include <span>
#include <vector>

#include "nlk/grid.hpp"
#include "nlk/kernel.hpp"

namespace nlk {

/// Observables recorded at one output time. All double integrals use the
/// outer quadrature weight w on top of the w already folded into W.
struct DiagnosticsRecord {
  double t = 0.0;
  double mean = 0.0;             ///< (1/|Omega|) sum w theta_i
  double diameter = 0.0;         ///< max - min
  double e_potential = 0.0;      ///< (kappa/2) sum W w (1 - cos)
  double e_kinetic = 0.0;        ///< (delta/4) [theta]^2
  double seminorm_sq = 0.0;      ///< [theta]^2 with the singular kernel
  double dist_sq = 0.0;          ///< ||theta - mean||^2
  double dissipation = 0.0;      ///< int_0^t ||d_t theta||^2
  double dual_bound = 0.0;       ///< upper bound on the dual norm of d_t theta; NaN if M >= pi
  double sin_seminorm_sq = 0.0;  ///< sum C w sin^2(theta_i - theta_j), coupling kernel (not in CSV)

  double energy() const { return e_potential + e_kinetic; }
};

double diameter(std::span<const double> theta);
double mean_phase(std::span<const double> theta, const Grid& grid);
/// sum w theta_i^2
double l2_norm_sq(std::span<const double> theta, double w);
/// ||theta - mean(theta)||^2
double dist_sq(std::span<const double> theta, const Grid& grid);

/// (kappa/2) sum_{i,j} W_ij w (1 - cos(theta_i - theta_j)), evaluated as
/// kappa sum W w 2 sin^2(./2) over unordered pairs.
double energy_potential(std::span<const double> theta, const KernelMatrix& w, double kappa);
/// (delta/4) seminorm_sq
double energy_kinetic(std::span<const double> theta, const KernelMatrix& w_sing, double delta);
/// sum_{i,j} W_ij w (theta_i - theta_j)^2
double seminorm_sq(std::span<const double> theta, const KernelMatrix& w_sing);
/// sum_{i,j} W_ij w sin^2(theta_i - theta_j)
double sin_seminorm_sq(std::span<const double> theta, const KernelMatrix& w);

/// (kappa/2) (sum C w sin^2)^(1/2) + (delta/2) [theta]. Throws ParameterError
/// when m >= pi.
double dual_bound_value(std::span<const double> theta, const KernelMatrix& coupling,
                        const KernelMatrix& w_sing, double kappa, double delta, double m);

/// sin(M)/M, with c(0) = 1. Throws ParameterError outside [0, pi).
double c_m(double m);

/// sum w ((theta - k)_+)^2 for upper = true, sum w ((k - theta)_+)^2 otherwise.
double truncation_excess_sq(std::span<const double> theta, double k, bool upper, double w);

struct PoincareResult {
  double lambda_star = 0.0;  ///< min over mean-zero u of [u]^2 / ||u||^2
  double residual = 0.0;     ///< ||L x - q x|| / q at exit
  int iterations = 0;
};

/// Smallest nonzero eigenvalue of the discrete nonlocal operator by inverse
/// iteration on the mean-zero subspace. Throws NumericalError if the residual
/// has not dropped below `tol` after `max_iterations`.
PoincareResult poincare_sharp_discrete(const KernelMatrix& w_sing, const Grid& grid,
                                       double tol = 1e-10, int max_iterations = 5000);

struct DecayFit {
  double rate = 0.0;      ///< slope of -log(y) against t
  double residual = 0.0;  ///< RMS of the log-linear residuals
  std::size_t points = 0;
};

/// Least-squares fit of -log(y) = a + rate t. Points with t below
/// transient_fraction * t_max are skipped and the series is cut at the first
/// value below `floor`. Throws NumericalError on nonpositive values or fewer
/// than two usable points.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y,
                        double transient_fraction = 0.1, double floor = 1e-28);

/// Everything needed to turn a state into a DiagnosticsRecord.
struct DiagnosticsContext {
  const Grid* grid = nullptr;
  const KernelMatrix* coupling = nullptr;     ///< kernel of the sine term
  const KernelMatrix* dissipation = nullptr;  ///< singular kernel
  double kappa = 0.0;
  double delta = 0.0;
  double diameter_bound = 0.0;  ///< M = D[theta_in]
};

DiagnosticsRecord observe(std::span<const double> theta, double t, double dissipation,
                          const DiagnosticsContext& ctx);

}  // namespace nlk
