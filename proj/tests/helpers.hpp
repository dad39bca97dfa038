#pragma once

#include "nlk/config.hpp"
#include "nlk/grid.hpp"
#include "oracles.hpp"

namespace testing {

inline nlk::SimConfig config_1d(int n, nlk::ModelKind model, double kappa, double delta,
                                double eps, double horizon) {
  nlk::SimConfig c;
  c.grid.dimension = 1;
  c.grid.nodes = n;
  c.grid.extents = {{0.0, 1.0}};
  c.physics.model = model;
  c.physics.kappa = kappa;
  c.physics.delta = delta;
  c.physics.epsilon = model == nlk::ModelKind::Regularized ? eps : 0.0;
  c.initial.kind = nlk::InitialKind::Random;
  c.initial.diameter = 1.0;
  c.initial.seed = 1;
  c.integrator.horizon = horizon;
  c.integrator.safety = 0.5;
  return c;
}

inline oracle::Box box_of(const nlk::Grid& g) {
  oracle::Box b;
  b.d = g.dimension();
  b.n = g.nodes_per_axis();
  for (int k = 0; k < b.d; ++k) {
    b.lo[k] = g.extents()[std::size_t(k)].lo;
    b.hi[k] = g.extents()[std::size_t(k)].hi;
  }
  return b;
}

}  // namespace testing
