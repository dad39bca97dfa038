#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlk/dynamics.hpp"
#include "nlk/grid.hpp"

namespace nlk {

enum class ModelKind { Lattice, Regularized, Singular };
enum class InitialKind { Constant, Smooth, Random, TwoCluster };
enum class Scheme { RK4, Euler };

std::string to_string(ModelKind m);
std::string to_string(InitialKind k);
std::string to_string(Scheme s);

struct GridConfig {
  int dimension = 1;
  int nodes = 64;
  std::vector<Extent> extents{{0.0, 1.0}};
};

struct PhysicsConfig {
  ModelKind model = ModelKind::Regularized;
  double s = 0.5;
  double kappa = 1.0;
  double delta = 0.1;
  double epsilon = 0.05;  ///< must be > 0 iff model == Regularized
  double nu = 0.0;        ///< constant natural frequency
  std::string nu_file;    ///< per-node frequencies, lattice model only
  std::vector<double> nu_values;  ///< loaded from nu_file
};

struct InitialConfig {
  InitialKind kind = InitialKind::Random;
  double diameter = 1.0;  ///< prescribed D[theta_in]
  double offset = 0.0;    ///< added to every node (the level for kind = constant)
  std::optional<std::uint64_t> seed;
};

/// Time stepping policy. Either a fixed dt or auto mode dt = safety / Lambda_eff.
struct IntegratorPolicy {
  Scheme scheme = Scheme::RK4;
  std::optional<double> dt;  ///< fixed step; empty selects auto mode
  double safety = 0.5;       ///< sigma in (0,1], auto mode only
  double horizon = 1.0;      ///< T
  int stride = 1;            ///< steps between diagnostic records and snapshots
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool snapshots = true;
  bool manifest = true;
  std::filesystem::path kernel_cache;  ///< empty: no on-disk kernel cache
};

struct SimConfig {
  GridConfig grid;
  PhysicsConfig physics;
  InitialConfig initial;
  IntegratorPolicy integrator;
  OutputConfig output;
  bool relaxation = false;  ///< relaxation diagnostics requested

  ModelParams params() const;
};

/// All invariant violations, each prefixed with its field path. Empty when the
/// configuration is valid.
std::vector<std::string> validate(const SimConfig& config);

/// Throws ConfigError listing every violation.
void require_valid(const SimConfig& config);

}  // namespace nlk
