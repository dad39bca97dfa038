// nlk: command-line front end for the nonlocal Kuramoto simulator.
//
// Exit codes: 0 success, 1 invariant failure, 2 configuration error,
// 3 numerical blow-up, 4 I/O or other runtime error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <string>
#include <vector>

#include "nlk/errors.hpp"
#include "nlk/experiments.hpp"
#include "nlk/initial.hpp"
#include "nlk/invariants.hpp"
#include "nlk/io.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kBlowUp = 3, kRuntime = 4 };

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "Configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a config value, section.key=value (repeatable)");
  cmd->add_option("--out", c.out, "Output directory (default: output.directory)");
}

nlk::SimConfig load(const Common& c) {
  auto cfg = nlk::parse_config(c.config, c.overrides);
  if (!c.out.empty()) cfg.output.directory = c.out;
  return cfg;
}

double initial_diameter(const nlk::SimConfig& cfg) {
  const auto grid = nlk::build_grid(cfg.grid.dimension, cfg.grid.nodes, cfg.grid.extents);
  return nlk::diameter(nlk::make_initial_condition(grid, cfg.initial));
}

// Singular dynamics without delta is only covered by the theory for
// D[theta_in] < pi.
void guard_large_diameter(const nlk::SimConfig& cfg, bool allow) {
  if (cfg.physics.model != nlk::ModelKind::Singular || cfg.physics.delta != 0.0) return;
  if (allow || initial_diameter(cfg) < std::numbers::pi) return;
  throw nlk::ConfigError(
      "initial.diameter: singular dynamics with delta = 0 needs D[theta_in] < pi; pass "
      "--allow-large-diameter to run anyway");
}

void print_record(const nlk::DiagnosticsRecord& r) {
  std::cout << "  t=" << nlk::format_number(r.t) << " diameter=" << nlk::format_number(r.diameter)
            << " E=" << nlk::format_number(r.energy())
            << " dist_sq=" << nlk::format_number(r.dist_sq) << '\n';
}

int finish_trajectory(const nlk::Trajectory& traj, const fs::path& dir) {
  nlk::write_outputs(traj, dir);
  std::cout << "status: " << nlk::to_string(traj.status) << ", " << traj.steps_taken << "/"
            << traj.steps_planned << " steps, dt=" << nlk::format_number(traj.dt) << '\n';
  if (!traj.records.empty()) print_record(traj.records.back());
  std::cout << "outputs: " << dir.string() << '\n';
  if (traj.status == nlk::TerminationStatus::BlowUp) {
    std::cerr << "blow-up: " << traj.message << '\n';
    return kBlowUp;
  }
  return kOk;
}

int cmd_simulate(const Common& c, bool allow) {
  const auto cfg = load(c);
  guard_large_diameter(cfg, allow);
  return finish_trajectory(nlk::simulate(cfg), cfg.output.directory);
}

int cmd_sweep(const Common& c, const std::vector<double>& ladder, unsigned workers, bool eps) {
  const auto cfg = load(c);
  const auto sweep =
      eps ? nlk::sweep_epsilon(cfg, ladder, workers) : nlk::sweep_delta(cfg, ladder, workers);
  nlk::write_sweep_outputs(sweep, cfg.output.directory);
  std::cout << sweep.parameter << " sweep, dt=" << nlk::format_number(sweep.dt) << '\n';
  for (std::size_t j = 0; j < sweep.deltas.size(); ++j) {
    std::cout << "  Delta_" << j << " = " << nlk::format_number(sweep.deltas[j]) << '\n';
  }
  std::cout << "decreasing: " << (sweep.deltas_decreasing() ? "yes" : "no")
            << ", uniform bound on every rung: " << (sweep.bounds_ok() ? "yes" : "no") << '\n';
  std::cout << "outputs: " << cfg.output.directory.string() << '\n';
  return sweep.bounds_ok() ? kOk : kInvariant;
}

int cmd_relax(const Common& c, bool allow) {
  // The config may enable relaxation diagnostics, which rejects D >= pi at
  // parse time; with the override the experiment decides below.
  Common loose = c;
  if (allow) loose.overrides.push_back("diagnostics.relaxation=false");
  auto cfg = load(loose);
  if (allow && !(initial_diameter(cfg) < std::numbers::pi)) {
    // Outside the theorem: run the dynamics, no certificate.
    cfg.physics.model = nlk::ModelKind::Singular;
    cfg.physics.delta = 0.0;
    cfg.physics.epsilon = 0.0;
    cfg.relaxation = false;
    std::cerr << "warning: D[theta_in] >= pi, relaxation certificate not applicable\n";
    return finish_trajectory(nlk::simulate(cfg), cfg.output.directory);
  }
  const auto rep = nlk::relaxation_experiment(cfg);
  nlk::write_relaxation_outputs(rep, cfg.output.directory);
  std::cout << "M            " << nlk::format_number(rep.m) << '\n'
            << "c_M          " << nlk::format_number(rep.c_m) << '\n'
            << "lambda_star  " << nlk::format_number(rep.lambda_star) << '\n'
            << "C_P_domain   " << nlk::format_number(rep.c_p_domain) << '\n'
            << "certified    " << nlk::format_number(rep.certified_rate) << '\n'
            << "fitted rate  " << nlk::format_number(rep.fit.rate) << '\n'
            << "worst ratio  " << nlk::format_number(rep.worst_ratio) << '\n'
            << "bound        " << (rep.bound_satisfied ? "satisfied" : "VIOLATED") << '\n'
            << "rate         " << (rep.rate_satisfied ? "satisfied" : "VIOLATED") << '\n';
  return rep.bound_satisfied && rep.rate_satisfied ? kOk : kInvariant;
}

int cmd_poincare(const Common& c) {
  const auto cfg = load(c);
  const auto grid = nlk::build_grid(cfg.grid.dimension, cfg.grid.nodes, cfg.grid.extents);
  const auto w = nlk::assemble_kernel_matrix(grid, nlk::KernelSpec::singular(), cfg.physics.s);
  const auto res = nlk::poincare_sharp_discrete(w, grid);
  const double cp = nlk::poincare_domain_constant(grid, cfg.physics.s);
  std::cout << "C_P_domain      " << nlk::format_number(cp) << '\n'
            << "lambda_star     " << nlk::format_number(res.lambda_star) << '\n'
            << "1/lambda_star   " << nlk::format_number(1.0 / res.lambda_star) << '\n'
            << "residual        " << nlk::format_number(res.residual) << '\n'
            << "iterations      " << res.iterations << '\n';
  return 1.0 / res.lambda_star <= cp ? kOk : kInvariant;
}

int cmd_verify(const Common& c) {
  auto cfg = load(c);
  cfg.output.snapshots = false;
  const auto model = nlk::Model::build(cfg);
  const auto traj = nlk::simulate(cfg, model);
  if (traj.status == nlk::TerminationStatus::BlowUp) {
    nlk::write_outputs(traj, cfg.output.directory);
    std::cerr << "blow-up: " << traj.message << '\n';
    return kBlowUp;
  }

  std::vector<nlk::InvariantCheck> checks = {
      nlk::check_mean_conservation(traj), nlk::check_diameter_monotone(traj),
      nlk::check_truncation(traj),        nlk::check_energy_monotone(traj),
      nlk::check_energy_identity(traj),   nlk::check_contraction(traj),
      nlk::check_uniform_bounds(traj)};
  const auto& ph = cfg.physics;
  if (cfg.relaxation && ph.model == nlk::ModelKind::Singular && ph.delta == 0.0 &&
      ph.kappa > 0.0) {
    const double lambda = nlk::poincare_sharp_discrete(model.singular(), model.grid()).lambda_star;
    const double rate = ph.kappa * nlk::c_m(traj.initial_diameter) * lambda;
    checks.push_back(nlk::check_relaxation_bound(traj, rate));
  }

  nlk::write_outputs(traj, cfg.output.directory);
  nlohmann::json report = nlohmann::json::array();
  bool ok = true;
  for (const auto& k : checks) {
    const char* tag = !k.applicable ? "SKIP" : (k.passed ? "PASS" : "FAIL");
    std::cout << tag << "  " << k.name;
    if (k.applicable) {
      std::cout << "  value=" << nlk::format_number(k.value)
                << " tol=" << nlk::format_number(k.tolerance);
    } else {
      std::cout << "  (" << k.reason << ")";
    }
    std::cout << '\n';
    if (k.applicable && !k.passed) ok = false;
    nlohmann::json j = {{"name", k.name}, {"applicable", k.applicable}};
    if (k.applicable) {
      j["passed"] = k.passed;
      j["value"] = std::isfinite(k.value) ? nlohmann::json(k.value) : nlohmann::json(nullptr);
      j["tolerance"] = k.tolerance;
    } else {
      j["reason"] = k.reason;
    }
    report.push_back(j);
  }
  std::ofstream(cfg.output.directory / "verify_report.json") << report.dump(2) << '\n';
  return ok ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Kuramoto simulator and invariant checker"};
  app.require_subcommand(1);

  Common common;
  bool allow = false;
  std::vector<double> ladder;
  unsigned workers = 0;

  auto* sim = app.add_subcommand("simulate", "Integrate one configuration and write outputs");
  add_common(sim, common);
  sim->add_flag("--allow-large-diameter", allow,
                "Run singular dynamics without delta even when D[theta_in] >= pi");

  auto* seps = app.add_subcommand("sweep-eps", "Epsilon ladder at fixed delta");
  add_common(seps, common);
  seps->add_option("--ladder", ladder, "Strictly decreasing epsilon values")->required();
  seps->add_option("--workers", workers, "Concurrent rungs (0 = hardware threads)");

  auto* sdel = app.add_subcommand("sweep-delta", "Delta ladder with the singular kernel");
  add_common(sdel, common);
  sdel->add_option("--ladder", ladder, "Strictly decreasing delta values")->required();
  sdel->add_option("--workers", workers, "Concurrent rungs (0 = hardware threads)");

  auto* relax = app.add_subcommand("relax", "Exponential relaxation experiment");
  add_common(relax, common);
  relax->add_flag("--allow-large-diameter", allow,
                  "Run without the certificate when D[theta_in] >= pi");

  auto* poin = app.add_subcommand("poincare", "Print C_P_domain and lambda_star");
  add_common(poin, common);

  auto* ver = app.add_subcommand("verify", "Run the invariant suite on a trajectory");
  add_common(ver, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(common, allow);
    if (seps->parsed()) return cmd_sweep(common, ladder, workers, true);
    if (sdel->parsed()) return cmd_sweep(common, ladder, workers, false);
    if (relax->parsed()) return cmd_relax(common, allow);
    if (poin->parsed()) return cmd_poincare(common);
    if (ver->parsed()) return cmd_verify(common);
  } catch (const nlk::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  } catch (const nlk::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfig;
  } catch (const nlk::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
