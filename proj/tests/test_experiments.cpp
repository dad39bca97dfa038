#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nlk/errors.hpp"
#include "nlk/experiments.hpp"

using namespace nlk;

TEST_SUITE("experiments") {
  TEST_CASE("constant data gives zero sweep differences") {
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.2);
    cfg.initial.kind = InitialKind::Constant;
    const auto se = sweep_epsilon(cfg, {0.2, 0.1, 0.05}, 1);
    for (double d : se.deltas) CHECK(d == 0.0);
    const auto sd = sweep_delta(cfg, {0.2, 0.1, 0.05}, 1);
    for (double d : sd.deltas) CHECK(d == 0.0);
  }

  TEST_CASE("epsilon only enters the sine term") {
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 0.0, 0.2, 0.1, 0.2);
    const auto se = sweep_epsilon(cfg, {0.2, 0.1, 0.05}, 2);
    for (double d : se.deltas) CHECK(d == 0.0);
  }

  TEST_CASE("rungs share dt, stride and output times") {
    auto cfg = testing::config_1d(32, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.3);
    cfg.initial.kind = InitialKind::Smooth;
    cfg.integrator.stride = 3;
    const auto se = sweep_epsilon(cfg, {0.2, 0.1, 0.05, 0.025}, 2);
    REQUIRE(se.rungs.size() == 4);
    for (const auto& r : se.rungs) {
      CHECK(r.trajectory.dt == doctest::Approx(se.rungs.front().trajectory.dt));
      CHECK(r.trajectory.snapshots.size() == se.rungs.front().trajectory.snapshots.size());
      CHECK(r.bound_ok);
    }
    // the smallest epsilon has the largest row sums and so sets dt
    const Model m = Model::build([&] {
      auto c = cfg;
      c.physics.epsilon = 0.025;
      return c;
    }());
    CHECK(se.dt == doctest::Approx(planned_dt(cfg, m)));
    CHECK(se.deltas.size() == 3);
    CHECK(se.deltas_decreasing());
  }

  TEST_CASE("concurrent and serial sweeps agree bitwise") {
    auto cfg = testing::config_1d(24, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.2);
    const auto a = sweep_epsilon(cfg, {0.2, 0.1, 0.05}, 1);
    const auto b = sweep_epsilon(cfg, {0.2, 0.1, 0.05}, 3);
    CHECK(a.deltas == b.deltas);
  }

  TEST_CASE("sweep preconditions") {
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.2);
    CHECK_THROWS_AS(sweep_epsilon(cfg, {0.1, 0.2}), ParameterError);
    CHECK_THROWS_AS(sweep_epsilon(cfg, {0.1}), ParameterError);
    auto nodelta = cfg;
    nodelta.physics.delta = 0.0;
    CHECK_THROWS_AS(sweep_epsilon(nodelta, {0.2, 0.1}), ConfigError);
    auto wide = cfg;
    wide.initial.diameter = 3.5;
    CHECK_THROWS_AS(sweep_delta(wide, {0.2, 0.1}), ConfigError);
  }

  TEST_CASE("blow-up aborts the sweep") {
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.1, 500.0);
    cfg.integrator.dt = 5.0;
    cfg.initial.diameter = 3.0;
    CHECK_THROWS_AS(sweep_epsilon(cfg, {0.2, 0.1}, 1), BlowUpError);
  }

  TEST_CASE("relaxation of two oscillators follows the closed form") {
    auto cfg = testing::config_1d(2, ModelKind::Singular, 1.0, 0.0, 0.0, 1.0);
    cfg.initial.kind = InitialKind::TwoCluster;
    cfg.initial.diameter = 2.0;
    cfg.integrator.safety = 0.02;
    const auto rep = relaxation_experiment(cfg);
    const double w12 = 2.0;  // psi(0.5) w with s = 0.5
    for (std::size_t k = 0; k < rep.trajectory.snapshots.size(); ++k) {
      const auto& s = rep.trajectory.snapshots[k];
      const double phi = s.values[1] - s.values[0];
      const double ref = oracle::two_oscillator_phase(-2.0, 1.0, w12, s.t);
      CHECK(std::abs(phi - ref) <= 1e-6 * std::abs(ref));
    }
    CHECK(rep.lambda_star == doctest::Approx(4.0 * w12).epsilon(1e-10));
    CHECK(rep.bound_satisfied);
    CHECK(rep.rate_satisfied);
  }

  TEST_CASE("relaxation preconditions") {
    auto cfg = testing::config_1d(16, ModelKind::Singular, 1.0, 0.0, 0.0, 0.5);
    cfg.initial.diameter = 3.2;
    CHECK_THROWS_AS(relaxation_experiment(cfg), ConfigError);
    cfg.initial.diameter = 1.0;
    cfg.physics.kappa = 0.0;
    CHECK_THROWS_AS(relaxation_experiment(cfg), ConfigError);
  }

  TEST_CASE("constant data relaxes trivially") {
    auto cfg = testing::config_1d(16, ModelKind::Singular, 1.0, 0.0, 0.0, 0.5);
    cfg.initial.kind = InitialKind::Constant;
    const auto rep = relaxation_experiment(cfg);
    CHECK(rep.bound_satisfied);
    CHECK(rep.rate_satisfied);
    for (const auto& r : rep.trajectory.records) CHECK(r.dist_sq == 0.0);
  }

  TEST_CASE("coarse restriction") {
    const std::vector<double> fine = {1, 3, 5, 7};
    CHECK(restrict_to_coarse(fine, 1, 4, 2) == std::vector<double>{2, 6});
    const std::vector<double> f2 = {1, 3, 5, 7, 1, 3, 5, 7, 0, 0, 0, 0, 0, 0, 0, 0};
    CHECK(restrict_to_coarse(f2, 2, 4, 2) == std::vector<double>{2, 6, 0, 0});
    CHECK_THROWS_AS(restrict_to_coarse(fine, 1, 4, 3), ContractError);
  }

  TEST_CASE("refinement study") {
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.5);
    cfg.initial.kind = InitialKind::Smooth;
    const auto table = refinement_study(cfg, {16, 32, 64, 128});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.rows[1].diff_to_next < table.rows[0].diff_to_next);
    CHECK(table.rows[2].diff_to_next < table.rows[1].diff_to_next);
    CHECK(std::isnan(table.rows[3].diff_to_next));
    CHECK(table.dt_halving_ratio >= 4.0);

    cfg.initial.kind = InitialKind::Constant;
    const auto flat = refinement_study(cfg, {16, 32});
    for (const auto& r : flat.rows) CHECK(r.energy_residual == 0.0);
  }
}
