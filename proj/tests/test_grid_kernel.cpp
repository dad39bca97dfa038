#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "helpers.hpp"
#include "nlk/errors.hpp"
#include "nlk/kernel.hpp"

using namespace nlk;

TEST_SUITE("grid") {
  TEST_CASE("midpoint nodes on [0,1] with n=4") {
    const Grid g = build_grid(1, 4, {{0.0, 1.0}});
    REQUIRE(g.size() == 4);
    const double expect[] = {0.125, 0.375, 0.625, 0.875};
    for (std::size_t i = 0; i < 4; ++i) CHECK(g.node(i)[0] == doctest::Approx(expect[i]));
    CHECK(g.cell_volume() == 0.25);
    CHECK(g.measure() == 1.0);
    CHECK(g.diameter() == 1.0);
  }

  TEST_CASE("unit square with n=2") {
    const Grid g = build_grid(2, 2, {{0.0, 1.0}, {0.0, 1.0}});
    CHECK(g.size() == 4);
    CHECK(g.cell_volume() == 0.25);
    CHECK(g.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // x index runs fastest
    CHECK(g.node(1)[0] == 0.75);
    CHECK(g.node(1)[1] == 0.25);
    CHECK(g.node(2)[0] == 0.25);
    CHECK(g.node(2)[1] == 0.75);
  }

  TEST_CASE("weights partition the domain") {
    const Grid g = build_grid(1, 1024, {{0.0, 1.0}});
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.cell_volume();
    CHECK(std::abs(s - 1.0) < 1e-12);
    const Grid g2 = build_grid(2, 8, {{-1.0, 2.0}, {0.0, 0.5}});
    CHECK(g2.cell_volume() * double(g2.size()) == doctest::Approx(g2.measure()).epsilon(1e-14));
  }

  TEST_CASE("nodes are interior and distinct") {
    const Grid g = build_grid(2, 5, {{0.0, 1.0}, {0.0, 2.0}});
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.node(i)[0] > 0.0);
      CHECK(g.node(i)[0] < 1.0);
      CHECK(g.node(i)[1] > 0.0);
      CHECK(g.node(i)[1] < 2.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(g.distance(i, j) > 0.0);
    }
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(build_grid(3, 4, {{0, 1}, {0, 1}, {0, 1}}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, 1, {{0, 1}}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, 4, {{1, 1}}), ConfigError);
    CHECK_THROWS_AS(build_grid(2, 4, {{0, 1}}), ConfigError);
  }

  TEST_CASE("domain Poincare constant") {
    CHECK(poincare_domain_constant(build_grid(1, 8, {{0, 1}}), 0.3) == 1.0);
    CHECK(poincare_domain_constant(build_grid(1, 8, {{0, 2}}), 0.5) == doctest::Approx(2.0));
    // max{sqrt 2, 1}^2.5 = 2^1.25
    CHECK(poincare_domain_constant(build_grid(2, 4, {{0, 1}, {0, 1}}), 0.25) ==
          doctest::Approx(2.378414230005442).epsilon(1e-14));
    CHECK_THROWS_AS(poincare_domain_constant(build_grid(1, 8, {{0, 1}}), 1.0), ParameterError);
  }

  TEST_CASE("fingerprint separates grids") {
    const Grid a = build_grid(1, 8, {{0, 1}});
    const Grid b = build_grid(1, 8, {{0, 1}});
    const Grid c = build_grid(1, 16, {{0, 1}});
    CHECK(a == b);
    CHECK_FALSE(a == c);
  }
}

TEST_SUITE("kernel") {
  TEST_CASE("kernel values") {
    CHECK(psi(0.5, 1, 0.5) == doctest::Approx(4.0));
    CHECK(psi(0.25, 2, 0.25) == doctest::Approx(32.0));
    CHECK(psi_eps(1.0, 1, 0.25, 0.1) == doctest::Approx(0.8667841720414474).epsilon(1e-14));
    CHECK_THROWS_AS(psi(0.0, 1, 0.5), SingularityError);
    CHECK_THROWS_AS(psi_eps(0.1, 1, 0.5, 0.0), ParameterError);
    CHECK(std::isfinite(psi_eps(0.0, 2, 0.9, 0.01)));
  }

  TEST_CASE("two-node singular matrix") {
    const Grid g = build_grid(1, 2, {{0, 1}});
    const auto w = assemble_kernel_matrix(g, KernelSpec::singular(), 0.5);
    // |x1 - x2| = 0.5, psi = 4, w = 0.5
    CHECK(w(0, 1) == doctest::Approx(2.0));
    CHECK(w(1, 0) == w(0, 1));
    CHECK(w(0, 0) == 0.0);
    CHECK(w.row_sum(0) == doctest::Approx(2.0));
  }

  TEST_CASE("matrix matches brute-force assembly") {
    for (int d : {1, 2}) {
      const Grid g = d == 1 ? build_grid(1, 12, {{0, 2}}) : build_grid(2, 5, {{0, 1}, {0, 3}});
      const auto b = testing::box_of(g);
      for (double eps : {0.0, 0.07}) {
        const auto spec = eps == 0.0 ? KernelSpec::singular() : KernelSpec::truncated(eps);
        const auto w = assemble_kernel_matrix(g, spec, 0.35);
        const auto o = oracle::weights(b, 0.35, eps);
        for (std::size_t i = 0; i < g.size(); ++i) {
          double rs = 0.0;
          for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(w(i, j) == doctest::Approx(o[i][j]).epsilon(1e-14));
            rs += o[i][j];
          }
          CHECK(w.row_sum(i) == doctest::Approx(rs).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("truncated kernel is monotone in epsilon and below the singular one") {
    const Grid g = build_grid(1, 32, {{0, 1}});
    const auto sing = assemble_kernel_matrix(g, KernelSpec::singular(), 0.5);
    const auto a = assemble_kernel_matrix(g, KernelSpec::truncated(0.1), 0.5);
    const auto b = assemble_kernel_matrix(g, KernelSpec::truncated(0.05), 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(a(i, j) <= b(i, j));
        CHECK(b(i, j) <= sing(i, j));
      }
    }
  }

  TEST_CASE("Lipschitz sums match brute force and stay below analytic bounds") {
    for (double eps : {0.5, 0.1, 0.02}) {
      const Grid g = build_grid(1, 64, {{0, 1}});
      const auto lb = lipschitz_bounds(g, 0.5, eps);
      const auto [k, ks] = oracle::lipschitz(testing::box_of(g), 0.5, eps);
      CHECK(lb.k_eps == doctest::Approx(k).epsilon(1e-13));
      CHECK(lb.k_eps_star == doctest::Approx(ks).epsilon(1e-13));
      CHECK(lb.k_eps <= g.measure() * std::pow(eps, -2.0 - 2.0));
      CHECK(lb.k_eps_star <= g.measure() * std::pow(eps, -1.0 - 1.0));
      CHECK(lb.l_inf == doctest::Approx(2.0 * lb.k_eps_star));
    }
  }

  TEST_CASE("kernel cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "nlk_kernel_cache_test";
    std::filesystem::remove_all(dir);
    const Grid g = build_grid(2, 4, {{0, 1}, {0, 1}});
    const auto spec = KernelSpec::truncated(0.2);
    const auto first = load_or_assemble(g, spec, 0.4, dir);
    REQUIRE(std::filesystem::exists(dir / (kernel_cache_key(g, spec, 0.4) + ".bin")));
    const auto second = load_or_assemble(g, spec, 0.4, dir);
    CHECK(second.variant() == KernelVariant::Truncated);
    CHECK(second.epsilon() == 0.2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) CHECK(first(i, j) == second(i, j));
    }
    const Grid other = build_grid(2, 5, {{0, 1}, {0, 1}});
    CHECK_THROWS_AS(read_kernel_cache(dir / (kernel_cache_key(g, spec, 0.4) + ".bin"), other),
                    IoError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("bad parameters") {
    const Grid g = build_grid(1, 4, {{0, 1}});
    CHECK_THROWS_AS(assemble_kernel_matrix(g, KernelSpec::singular(), 1.0), ParameterError);
    CHECK_THROWS_AS(assemble_kernel_matrix(g, KernelSpec::truncated(0.0), 0.5), ParameterError);
  }
}
