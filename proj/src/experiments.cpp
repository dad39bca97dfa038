#include "nlk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include "nlk/errors.hpp"
#include "nlk/initial.hpp"
#include "nlk/io.hpp"

namespace nlk {

namespace {

void check_ladder(const std::vector<double>& ladder, const char* name) {
  if (ladder.size() < 2) {
    throw ParameterError(std::string(name) + " ladder needs at least two rungs");
  }
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    if (!(ladder[j] > 0.0)) throw ParameterError(std::string(name) + " ladder must be positive");
    if (j > 0 && !(ladder[j] < ladder[j - 1])) {
      throw ParameterError(std::string(name) + " ladder must be strictly decreasing");
    }
  }
}

// Runs job(i) for i in [0, count) on up to `workers` threads. The first
// exception (lowest index) is rethrown after all threads join.
void run_indexed(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SweepResult run_sweep(const std::string& parameter, const SimConfig& base,
                      const std::vector<double>& ladder, unsigned workers,
                      const std::function<void(SimConfig&, double)>& set_value,
                      const std::string& bound_row) {
  SweepResult result;
  result.parameter = parameter;
  result.ladder = ladder;
  result.stride = base.integrator.stride;

  std::vector<SimConfig> configs;
  for (double v : ladder) {
    SimConfig c = base;
    set_value(c, v);
    require_valid(c);
    configs.push_back(std::move(c));
  }

  std::vector<Model> models;
  models.push_back(Model::build(configs.front()));
  for (std::size_t j = 1; j < configs.size(); ++j) {
    models.push_back(Model::build(configs[j], models.front().singular_ptr()));
  }

  double dt = std::numeric_limits<double>::infinity();
  if (base.integrator.dt) {
    dt = *base.integrator.dt;
  } else {
    for (std::size_t j = 0; j < configs.size(); ++j) {
      dt = std::min(dt, planned_dt(configs[j], models[j]));
    }
  }
  result.dt = dt;
  for (auto& c : configs) c.integrator.dt = dt;

  result.rungs.resize(configs.size());
  run_indexed(configs.size(), workers, [&](std::size_t j) {
    RungResult& r = result.rungs[j];
    r.value = ladder[j];
    r.config = configs[j];
    r.config_hash = config_hash(configs[j]);
    r.trajectory = simulate(configs[j], models[j]);
    r.bounds = uniform_bound_report(r.trajectory);
    const BoundRow* row = r.bounds.find(bound_row);
    r.bound_ok = row != nullptr && row->applicable && row->satisfied;
  });

  for (std::size_t j = 0; j < result.rungs.size(); ++j) {
    const auto& tr = result.rungs[j].trajectory;
    if (tr.status == TerminationStatus::BlowUp) {
      const double t = tr.records.empty() ? 0.0 : tr.records.back().t;
      throw BlowUpError("sweep aborted: rung " + std::to_string(j) + " (" + parameter + "=" +
                            format_number(ladder[j]) + ") blew up: " + tr.message,
                        t, {});
    }
  }

  const double w = models.front().grid().cell_volume();
  for (std::size_t j = 0; j + 1 < result.rungs.size(); ++j) {
    const auto& a = result.rungs[j].trajectory.snapshots;
    const auto& b = result.rungs[j + 1].trajectory.snapshots;
    if (a.size() != b.size()) throw ContractError("sweep rungs recorded different output times");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, l2_distance(a[k].values, b[k].values, w));
    }
    result.deltas.push_back(worst);
  }
  return result;
}

}  // namespace

bool SweepResult::deltas_decreasing() const {
  for (std::size_t j = 1; j < deltas.size(); ++j) {
    if (!(deltas[j] < deltas[j - 1])) return false;
  }
  return true;
}

bool SweepResult::bounds_ok() const {
  return std::all_of(rungs.begin(), rungs.end(), [](const RungResult& r) { return r.bound_ok; });
}

double l2_distance(std::span<const double> a, std::span<const double> b, double w) {
  if (a.size() != b.size()) throw ContractError("l2_distance: sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc * w);
}

SweepResult sweep_epsilon(const SimConfig& base, const std::vector<double>& ladder,
                          unsigned workers) {
  check_ladder(ladder, "epsilon");
  if (!(base.physics.delta > 0.0)) {
    throw ConfigError("physics.delta: the epsilon sweep needs a fixed delta > 0");
  }
  return run_sweep(
      "epsilon", base, ladder, workers,
      [](SimConfig& c, double v) {
        c.physics.model = ModelKind::Regularized;
        c.physics.epsilon = v;
      },
      "seminorm_delta_bound");
}

SweepResult sweep_delta(const SimConfig& base, const std::vector<double>& ladder,
                        unsigned workers) {
  check_ladder(ladder, "delta");
  const Grid grid = build_grid(base.grid.dimension, base.grid.nodes, base.grid.extents);
  if (!(diameter(make_initial_condition(grid, base.initial)) < std::numbers::pi)) {
    throw ConfigError("initial.diameter: the delta sweep needs D[theta_in] < pi");
  }
  return run_sweep(
      "delta", base, ladder, workers,
      [](SimConfig& c, double v) {
        c.physics.model = ModelKind::Singular;
        c.physics.epsilon = 0.0;
        c.physics.delta = v;
      },
      "seminorm_diameter_bound");
}

RelaxationReport relaxation_experiment(const SimConfig& config, double tol) {
  SimConfig c = config;
  c.physics.model = ModelKind::Singular;
  c.physics.delta = 0.0;
  c.physics.epsilon = 0.0;
  c.relaxation = true;

  std::vector<std::string> problems = validate(c);
  if (!(c.physics.kappa > 0.0)) problems.push_back("physics.kappa: relaxation needs kappa > 0");
  if (!problems.empty()) throw ConfigError(std::move(problems));

  const Model model = Model::build(c);
  RelaxationReport rep;
  rep.trajectory = simulate(c, model);
  if (rep.trajectory.status == TerminationStatus::BlowUp) {
    throw BlowUpError("relaxation run blew up: " + rep.trajectory.message,
                      rep.trajectory.records.back().t, {});
  }
  rep.m = rep.trajectory.initial_diameter;
  rep.c_m = c_m(rep.m);
  rep.lambda_star = poincare_sharp_discrete(model.singular(), model.grid()).lambda_star;
  rep.c_p_domain = poincare_domain_constant(model.grid(), c.physics.s);
  rep.certified_rate = c.physics.kappa * rep.c_m * rep.lambda_star;

  const auto check = check_relaxation_bound(rep.trajectory, rep.certified_rate, tol);
  rep.worst_ratio = check.value;
  rep.bound_satisfied = check.passed;

  const auto& rs = rep.trajectory.records;
  if (rs.front().dist_sq > 0.0) {
    std::vector<double> t;
    std::vector<double> y;
    for (const auto& r : rs) {
      t.push_back(r.t);
      y.push_back(r.dist_sq);
    }
    rep.fit = fit_decay_rate(t, y);
    rep.rate_satisfied = rep.fit.rate >= rep.certified_rate;
  }
  return rep;
}

std::vector<double> restrict_to_coarse(std::span<const double> fine, int dimension,
                                       int fine_nodes, int coarse_nodes) {
  if (coarse_nodes <= 0 || fine_nodes % coarse_nodes != 0) {
    throw ContractError("restrict_to_coarse: fine node count must be a multiple of the coarse one");
  }
  const int r = fine_nodes / coarse_nodes;
  const auto fn = static_cast<std::size_t>(fine_nodes);
  const auto cn = static_cast<std::size_t>(coarse_nodes);
  if (dimension == 1) {
    if (fine.size() != fn) throw ContractError("restrict_to_coarse: size mismatch");
    std::vector<double> out(cn, 0.0);
    for (std::size_t i = 0; i < fn; ++i) out[i / static_cast<std::size_t>(r)] += fine[i];
    for (double& v : out) v /= r;
    return out;
  }
  if (fine.size() != fn * fn) throw ContractError("restrict_to_coarse: size mismatch");
  std::vector<double> out(cn * cn, 0.0);
  const auto ru = static_cast<std::size_t>(r);
  for (std::size_t iy = 0; iy < fn; ++iy) {
    for (std::size_t ix = 0; ix < fn; ++ix) out[ix / ru + cn * (iy / ru)] += fine[ix + fn * iy];
  }
  for (double& v : out) v /= static_cast<double>(r * r);
  return out;
}

RefinementTable refinement_study(const SimConfig& base, const std::vector<int>& nodes) {
  if (nodes.empty()) throw ParameterError("refinement_study: empty node ladder");
  RefinementTable table;
  std::vector<std::vector<double>> finals;
  const int coarse = nodes.front();
  for (int n : nodes) {
    SimConfig c = base;
    c.grid.nodes = n;
    const Trajectory tr = simulate(c);
    RefinementRow row;
    row.nodes = n;
    row.dt = tr.dt;
    row.energy_residual = energy_identity_relative(tr);
    table.rows.push_back(row);
    finals.push_back(
        restrict_to_coarse(tr.snapshots.back().values, c.grid.dimension, n, coarse));
  }
  double w_coarse = 1.0;
  for (const auto& e : base.grid.extents) w_coarse *= e.length() / coarse;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    table.rows[k].diff_to_next = k + 1 < finals.size()
                                     ? l2_distance(finals[k], finals[k + 1], w_coarse)
                                     : std::numeric_limits<double>::quiet_NaN();
  }

  const Trajectory full = simulate(base);
  SimConfig half = base;
  half.integrator.dt = full.dt / 2.0;
  const Trajectory halved = simulate(half);
  table.residual_coarse_dt = energy_identity_relative(full);
  table.residual_half_dt = energy_identity_relative(halved);
  table.dt_halving_ratio = table.residual_half_dt > 0.0
                               ? table.residual_coarse_dt / table.residual_half_dt
                               : std::numeric_limits<double>::infinity();
  return table;
}

}  // namespace nlk
