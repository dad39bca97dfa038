#include "nlk/integrate.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "nlk/errors.hpp"
#include "nlk/initial.hpp"

namespace nlk {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double weighted_sq(std::span<const double> v, double w) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc * w;
}

}  // namespace

GaugeReduction gauge_reduce(const PhaseField& theta_in, const Grid& grid, double nu) {
  (void)nu;  // the drift only enters the inverse map
  GaugeReduction g;
  g.mean = mean_phase(theta_in.values, grid);
  g.reduced.t = theta_in.t;
  g.reduced.values = theta_in.values;
  for (double& v : g.reduced.values) v -= g.mean;
  return g;
}

double stiffness_bound(const KernelMatrix& coupling, const KernelMatrix& w_sing, double kappa,
                       double delta) {
  return 2.0 * kappa * coupling.max_row_sum() + 2.0 * delta * w_sing.max_row_sum();
}

double select_dt(const KernelMatrix& coupling, const KernelMatrix& w_sing, double kappa,
                 double delta, double safety, double fallback_horizon) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ParameterError("select_dt: safety must be in (0,1]");
  const double lambda = stiffness_bound(coupling, w_sing, kappa, delta);
  if (lambda == 0.0) return safety * fallback_horizon;
  return safety / lambda;
}

Stepper::Stepper(RhsFunction rhs, std::size_t n, Scheme scheme, double l2_weight)
    : rhs_(std::move(rhs)),
      scheme_(scheme),
      w_(l2_weight),
      k1_(n),
      k2_(n),
      k3_(n),
      k4_(n),
      tmp_(n),
      next_(n) {}

double Stepper::advance(std::vector<double>& theta, double t, double dt) {
  const std::size_t n = theta.size();
  double increment = 0.0;
  rhs_(theta, k1_);
  if (scheme_ == Scheme::Euler) {
    for (std::size_t i = 0; i < n; ++i) next_[i] = theta[i] + dt * k1_[i];
    increment = dt * weighted_sq(k1_, w_);
  } else {
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = theta[i] + 0.5 * dt * k1_[i];
    rhs_(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = theta[i] + 0.5 * dt * k2_[i];
    rhs_(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = theta[i] + dt * k3_[i];
    rhs_(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      next_[i] = theta[i] + dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    increment = dt / 6.0 *
                (weighted_sq(k1_, w_) + 2.0 * weighted_sq(k2_, w_) + 2.0 * weighted_sq(k3_, w_) +
                 weighted_sq(k4_, w_));
  }
  if (!all_finite(next_) || !std::isfinite(increment)) {
    throw BlowUpError("non-finite state after step at t=" + std::to_string(t), t, theta);
  }
  theta.swap(next_);
  return increment;
}

PhaseField step(const PhaseField& theta, const RhsFunction& rhs, double dt, Scheme scheme) {
  if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
  Stepper stepper(rhs, theta.size(), scheme, 1.0);
  PhaseField out{theta.t, theta.values};
  stepper.advance(out.values, theta.t, dt);
  out.t = theta.t + dt;
  return out;
}

Model Model::build(const SimConfig& config, std::shared_ptr<const KernelMatrix> shared_singular) {
  require_valid(config);
  Model m;
  m.kind_ = config.physics.model;
  m.params_ = config.params();
  m.grid_ = std::make_shared<const Grid>(
      build_grid(config.grid.dimension, config.grid.nodes, config.grid.extents));
  const double s = config.physics.s;
  const auto assemble = [&](KernelSpec spec) {
    if (!config.output.kernel_cache.empty()) {
      return load_or_assemble(*m.grid_, spec, s, config.output.kernel_cache);
    }
    return assemble_kernel_matrix(*m.grid_, spec, s);
  };

  if (shared_singular && shared_singular->grid_fingerprint() == m.grid_->fingerprint() &&
      shared_singular->s() == s && shared_singular->variant() == KernelVariant::Singular) {
    m.singular_ = std::move(shared_singular);
  } else {
    m.singular_ = std::make_shared<const KernelMatrix>(assemble(KernelSpec::singular()));
  }
  if (m.kind_ == ModelKind::Regularized) {
    m.truncated_ = std::make_shared<const KernelMatrix>(
        assemble(KernelSpec::truncated(config.physics.epsilon)));
  }
  if (m.kind_ == ModelKind::Lattice) {
    m.lattice_ = std::make_shared<const SymmetricMatrix>(
        pairwise_kernel(*m.grid_, KernelSpec::singular(), s));
    if (!config.physics.nu_values.empty()) {
      m.nu_nodes_ = config.physics.nu_values;
    } else {
      m.nu_nodes_.assign(m.grid_->size(), config.physics.nu);
    }
  }
  return m;
}

void Model::rhs(std::span<const double> theta, std::span<double> rate) const {
  switch (kind_) {
    case ModelKind::Lattice:
      rhs_lattice(theta, *lattice_, params_.kappa, nu_nodes_, rate);
      break;
    case ModelKind::Regularized:
      rhs_regularized(theta, *truncated_, *singular_, params_.kappa, params_.delta, rate);
      break;
    case ModelKind::Singular:
      if (params_.delta == 0.0) {
        rhs_singular(theta, *singular_, params_.kappa, rate);
      } else {
        rhs_regularized(theta, *singular_, *singular_, params_.kappa, params_.delta, rate);
      }
      break;
  }
}

RhsFunction Model::rhs_function() const {
  return [self = *this](std::span<const double> theta, std::span<double> rate) {
    self.rhs(theta, rate);
  };
}

double Model::stiffness() const {
  if (kind_ == ModelKind::Lattice) {
    // kappa/N * psi = kappa/|Omega| * W
    return 2.0 * params_.kappa * singular_->max_row_sum() / grid_->measure();
  }
  return stiffness_bound(coupling(), *singular_, params_.kappa, params_.delta);
}

DiagnosticsContext Model::diagnostics_context(double diameter_bound) const {
  DiagnosticsContext ctx;
  ctx.grid = grid_.get();
  ctx.dissipation = singular_.get();
  ctx.diameter_bound = diameter_bound;
  if (kind_ == ModelKind::Lattice) {
    ctx.coupling = singular_.get();
    ctx.kappa = params_.kappa / grid_->measure();
    ctx.delta = 0.0;
  } else {
    ctx.coupling = &coupling();
    ctx.kappa = params_.kappa;
    ctx.delta = params_.delta;
  }
  return ctx;
}

std::string to_string(TerminationStatus s) {
  switch (s) {
    case TerminationStatus::Completed:
      return "completed";
    case TerminationStatus::BlowUp:
      return "blow-up";
    case TerminationStatus::Aborted:
      return "aborted";
  }
  return "unknown";
}

PhaseField Trajectory::physical(std::size_t k) const {
  PhaseField p = snapshots.at(k);
  if (gauge_reduced) {
    const double shift = mean_offset + nu * p.t;
    for (double& v : p.values) v += shift;
  }
  return p;
}

double planned_dt(const SimConfig& config, const Model& model) {
  const auto& pol = config.integrator;
  if (pol.dt) return *pol.dt;
  const double lambda = model.stiffness();
  if (lambda == 0.0) return pol.safety * pol.horizon;
  return pol.safety / lambda;
}

Trajectory simulate(const SimConfig& config) { return simulate(config, Model::build(config)); }

Trajectory simulate(const SimConfig& config, const Model& model) {
  require_valid(config);
  const auto wall_start = std::chrono::steady_clock::now();
  const Grid& grid = model.grid();

  Trajectory traj;
  traj.config = config;

  PhaseField theta_in{0.0, make_initial_condition(grid, config.initial)};
  traj.initial_diameter = diameter(theta_in.values);
  if (config.relaxation && !(traj.initial_diameter < std::numbers::pi)) {
    throw ConfigError(
        "initial.diameter: D[theta_in] must be < pi when relaxation diagnostics are enabled");
  }

  std::vector<double> theta;
  if (model.kind() == ModelKind::Lattice) {
    theta = std::move(theta_in.values);
  } else {
    auto g = gauge_reduce(theta_in, grid, config.physics.nu);
    theta = std::move(g.reduced.values);
    traj.gauge_reduced = true;
    traj.mean_offset = g.mean;
    traj.nu = config.physics.nu;
  }

  const double horizon = config.integrator.horizon;
  const double dt0 = planned_dt(config, model);
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt0 - 1e-9)));
  const double dt = horizon / static_cast<double>(steps);
  traj.dt = dt;
  traj.steps_planned = steps;

  const DiagnosticsContext ctx = model.diagnostics_context(traj.initial_diameter);
  const auto stride = static_cast<std::size_t>(config.integrator.stride);

  double dissipation = 0.0;
  traj.snapshots.push_back({0.0, theta});
  traj.records.push_back(observe(theta, 0.0, dissipation, ctx));

  Stepper stepper(model.rhs_function(), theta.size(), config.integrator.scheme,
                  grid.cell_volume());
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    try {
      dissipation += stepper.advance(theta, t_prev, dt);
    } catch (const BlowUpError& e) {
      traj.status = TerminationStatus::BlowUp;
      traj.message = e.what();
      if (traj.snapshots.back().t != t_prev) {
        traj.snapshots.push_back({t_prev, theta});
        traj.records.push_back(observe(theta, t_prev, dissipation, ctx));
      }
      break;
    }
    traj.steps_taken = k;
    if (k % stride == 0 || k == steps) {
      const double t = k == steps ? horizon : static_cast<double>(k) * dt;
      traj.snapshots.push_back({t, theta});
      traj.records.push_back(observe(theta, t, dissipation, ctx));
    }
  }

  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return traj;
}

}  // namespace nlk
