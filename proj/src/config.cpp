#include "nlk/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream out;
  out << "invalid configuration (" << v.size() << " violation" << (v.size() == 1 ? "" : "s")
      << ")";
  for (const auto& s : v) out << "\n  " << s;
  return out.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Lattice:
      return "lattice";
    case ModelKind::Regularized:
      return "regularized";
    case ModelKind::Singular:
      return "singular";
  }
  return "unknown";
}

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::Constant:
      return "constant";
    case InitialKind::Smooth:
      return "smooth";
    case InitialKind::Random:
      return "random";
    case InitialKind::TwoCluster:
      return "two_cluster";
  }
  return "unknown";
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::RK4:
      return "rk4";
    case Scheme::Euler:
      return "euler";
  }
  return "unknown";
}

ModelParams SimConfig::params() const {
  ModelParams p;
  p.kappa = physics.kappa;
  p.delta = physics.delta;
  p.s = physics.s;
  p.epsilon = physics.model == ModelKind::Regularized ? physics.epsilon : 0.0;
  if (!physics.nu_values.empty()) {
    p.nu = physics.nu_values;
  } else {
    p.nu = physics.nu;
  }
  return p;
}

std::vector<std::string> validate(const SimConfig& c) {
  std::vector<std::string> v;
  const auto add = [&v](std::string s) { v.push_back(std::move(s)); };

  const auto& g = c.grid;
  if (g.dimension != 1 && g.dimension != 2) add("grid.dimension: must be 1 or 2");
  if (g.nodes < 2) add("grid.nodes: must be >= 2");
  if (g.dimension == 1 || g.dimension == 2) {
    if (g.extents.size() != static_cast<std::size_t>(g.dimension)) {
      add("grid.extents: need one (lo, hi) pair per axis");
    }
  }
  for (std::size_t k = 0; k < g.extents.size(); ++k) {
    const auto& e = g.extents[k];
    if (!(std::isfinite(e.lo) && std::isfinite(e.hi) && e.hi > e.lo)) {
      add("grid.extents: axis " + std::to_string(k) + " must satisfy lo < hi");
    }
  }

  const auto& p = c.physics;
  if (!(p.s > 0.0 && p.s < 1.0)) add("physics.s: must lie in the open interval (0,1)");
  if (!(p.kappa >= 0.0)) add("physics.kappa: must be >= 0");
  if (!(p.delta >= 0.0)) add("physics.delta: must be >= 0");
  if (p.model == ModelKind::Regularized) {
    if (!(p.epsilon > 0.0)) add("physics.epsilon: must be > 0 for the regularized model");
  } else if (p.epsilon != 0.0) {
    add("physics.epsilon: must be 0 unless model = regularized");
  }
  if (!std::isfinite(p.nu)) add("physics.nu: must be finite");
  if (!p.nu_values.empty()) {
    if (p.model != ModelKind::Lattice) {
      add("physics.nu_file: per-node frequencies are only supported by the lattice model");
    }
    if (g.nodes >= 2 && (g.dimension == 1 || g.dimension == 2)) {
      std::size_t n = static_cast<std::size_t>(g.nodes);
      if (g.dimension == 2) n *= n;
      if (p.nu_values.size() != n) {
        add("physics.nu_file: expected " + std::to_string(n) + " values, got " +
            std::to_string(p.nu_values.size()));
      }
    }
  }

  const auto& ic = c.initial;
  if (!(ic.diameter >= 0.0) || !std::isfinite(ic.diameter)) {
    add("initial.diameter: must be finite and >= 0");
  }
  if (!std::isfinite(ic.offset)) add("initial.offset: must be finite");
  if (ic.kind == InitialKind::Random && !ic.seed) {
    add("initial.seed: required when kind = random");
  }
  if (c.relaxation) {
    if (ic.kind != InitialKind::Constant && !(ic.diameter < std::numbers::pi)) {
      add("initial.diameter: must be < pi when relaxation diagnostics are enabled");
    }
    if (!p.nu_values.empty()) {
      add("physics.nu_file: relaxation diagnostics need a constant natural frequency");
    }
  }

  const auto& it = c.integrator;
  if (!(it.horizon > 0.0) || !std::isfinite(it.horizon)) add("integrator.horizon: must be > 0");
  if (it.dt && !(*it.dt > 0.0)) add("integrator.dt: must be > 0");
  if (!(it.safety > 0.0 && it.safety <= 1.0)) add("integrator.safety: must lie in (0,1]");
  if (it.stride < 1) add("output.stride: must be >= 1");

  return v;
}

void require_valid(const SimConfig& config) {
  auto v = validate(config);
  if (!v.empty()) throw ConfigError(std::move(v));
}

}  // namespace nlk
