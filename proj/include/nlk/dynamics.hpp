#pragma once

#include <span>
#include <variant>
#include <vector>

#include "nlk/kernel.hpp"

namespace nlk {

/// Node-indexed phases (radians) at simulation time t.
struct PhaseField {
  double t = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// Natural frequency: one constant for the continuum models, or one value per
/// node (lattice model only).
using NaturalFrequency = std::variant<double, std::vector<double>>;

struct ModelParams {
  double kappa = 1.0;
  double delta = 0.0;
  NaturalFrequency nu = 0.0;
  double s = 0.5;
  double epsilon = 0.0;

  bool constant_nu() const { return std::holds_alternative<double>(nu); }
};

// All right-hand sides write per-node rates into `rate` (same length as
// theta). They are pure functions of their inputs and throw ContractError on
// size or variant mismatches.

/// rate_i = kappa * sum_{j != i} W_ij sin(theta_j - theta_i)
void rhs_singular(std::span<const double> theta, const KernelMatrix& w_sing, double kappa,
                  std::span<double> rate);

/// rate_i = kappa * sum_j C_ij sin(theta_j - theta_i) - delta * sum_j S_ij (theta_i - theta_j)
///
/// `coupling` is normally the truncated matrix; passing the singular matrix
/// gives the delta-regularized equation with the full kernel in the sine term.
void rhs_regularized(std::span<const double> theta, const KernelMatrix& coupling,
                     const KernelMatrix& w_sing, double kappa, double delta,
                     std::span<double> rate);

/// rate_a = nu_a + (kappa / N) * sum_b weights_ab sin(theta_b - theta_a)
/// Note the 1/N normalization: `weights` are raw kernel values, not
/// quadrature-weighted.
void rhs_lattice(std::span<const double> theta, const SymmetricMatrix& weights, double kappa,
                 std::span<const double> nu, std::span<double> rate);

/// A(u,v) = 1/2 sum_{i,j} W_ij w (u_i - u_j)(v_i - v_j)
double bilinear_form(std::span<const double> u, std::span<const double> v,
                     const KernelMatrix& w_sing);

}  // namespace nlk
