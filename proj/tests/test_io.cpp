#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "nlk/errors.hpp"
#include "nlk/io.hpp"

using namespace nlk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlk_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool mentions(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.violations().begin(), e.violations().end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

const char* kMinimal = R"(
[grid]
nodes = 32

[initial]
seed = 5
)";

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("minimal config gets defaults") {
    const auto c = parse_config_text(kMinimal);
    CHECK(c.grid.dimension == 1);
    CHECK(c.grid.nodes == 32);
    CHECK(c.grid.extents.size() == 1);
    CHECK(c.physics.model == ModelKind::Regularized);
    CHECK(c.physics.epsilon > 0.0);
    CHECK(c.initial.seed == 5u);
    CHECK_FALSE(c.integrator.dt.has_value());
  }

  TEST_CASE("singular model defaults epsilon to zero") {
    const auto c = parse_config_text(std::string(kMinimal) + "[physics]\nmodel = singular\n");
    CHECK(c.physics.epsilon == 0.0);
  }

  TEST_CASE("s outside (0,1) is rejected") {
    try {
      parse_config_text(std::string(kMinimal) + "[physics]\ns = 1.2\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "physics.s"));
      CHECK(mentions(e, "(0,1)"));
    }
  }

  TEST_CASE("large diameter with relaxation is rejected") {
    try {
      parse_config_text(std::string(kMinimal) +
                        "[physics]\nmodel = singular\ndelta = 0\n"
                        "[diagnostics]\nrelaxation = true\n",
                        {"initial.diameter=3.5"});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "initial.diameter"));
      CHECK(mentions(e, "< pi"));
    }
  }

  TEST_CASE("every violation is reported") {
    const std::string text = R"(
[grid]
nodes = 1
[physics]
model = singular
s = 0
kappa = -1
epsilon = 0.1
[initial]
kind = random
[integrator]
horizon = 0
safety = 2
[output]
stride = 0
)";
    try {
      parse_config_text(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      for (const char* k : {"grid.nodes", "physics.s", "physics.kappa", "physics.epsilon",
                            "initial.seed", "integrator.horizon", "integrator.safety",
                            "output.stride"}) {
        CHECK_MESSAGE(mentions(e, k), k);
      }
    }
  }

  TEST_CASE("malformed values and unknown keys") {
    try {
      parse_config_text("[grid]\nnodes = many\ncolour = red\n[initial]\nseed=1\n[extra]\nx=1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "grid.nodes"));
      CHECK(mentions(e, "grid.colour"));
      CHECK(mentions(e, "extra"));
    }
    CHECK_THROWS_AS(parse_config_text(kMinimal, {"nodes=3"}), ConfigError);
  }

  TEST_CASE("overrides take precedence") {
    const auto c = parse_config_text(kMinimal, {"grid.nodes=48", "integrator.dt=0.01",
                                                "physics.model=lattice", "physics.epsilon=0"});
    CHECK(c.grid.nodes == 48);
    CHECK(c.integrator.dt == 0.01);
    CHECK(c.physics.model == ModelKind::Lattice);
  }

  TEST_CASE("2D extents shorthand") {
    const auto c = parse_config_text("[grid]\ndimension=2\nnodes=4\nextents=0 2\n[initial]\nseed=1\n");
    REQUIRE(c.grid.extents.size() == 2);
    CHECK(c.grid.extents[1].hi == 2.0);
  }

  TEST_CASE("per-node frequencies from a file") {
    const auto dir = scratch("nu");
    {
      std::ofstream(dir / "nu.txt") << "0.1 0.2\n0.3 0.4\n";
      std::ofstream(dir / "cfg.ini") << "[grid]\nnodes=4\n[physics]\nmodel=lattice\nepsilon=0\n"
                                        "nu_file=nu.txt\n[initial]\nseed=2\n";
    }
    const auto c = parse_config(dir / "cfg.ini");
    CHECK(c.physics.nu_values == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(parse_config(dir / "cfg.ini", {"grid.nodes=5"}), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("canonical text round trips and hashes stably") {
    auto c = parse_config_text(kMinimal, {"physics.kappa=0.1", "physics.s=0.3333333333333333"});
    const std::string text = canonical_config_text(c);
    const auto back = parse_config_text(text);
    CHECK(canonical_config_text(back) == text);
    CHECK(config_hash(back) == config_hash(c));
    auto other = c;
    other.physics.kappa = 0.2;
    CHECK(config_hash(other) != config_hash(c));
    CHECK(hash_hex(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("shortest round-trip numbers") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
      const double v = u(rng) * std::pow(10.0, k % 40 - 20);
      CHECK(std::stod(format_number(v)) == v);
    }
  }

  TEST_CASE("diagnostics CSV round trip") {
    const auto dir = scratch("csv");
    auto cfg = testing::config_1d(24, ModelKind::Regularized, 1.0, 0.1, 0.05, 0.3);
    const auto tr = simulate(cfg);
    write_diagnostics_csv(dir / "d.csv", tr.records);
    std::ifstream in(dir / "d.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,mean,diameter,E_P,E_K,seminorm_sq,dist_sq,dissipation_cum,dual_bound");
    const auto back = read_diagnostics_csv(dir / "d.csv");
    REQUIRE(back.size() == tr.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
      CHECK(back[k].t == tr.records[k].t);
      CHECK(back[k].mean == tr.records[k].mean);
      CHECK(back[k].e_potential == tr.records[k].e_potential);
      CHECK(back[k].dissipation == tr.records[k].dissipation);
      CHECK(back[k].dual_bound == tr.records[k].dual_bound);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("snapshot round trip") {
    const auto dir = scratch("snap");
    const PhaseField f{0.25, {1.0, -2.0, 3.5, 0.125}};
    write_snapshot(dir / "s.bin", 2, 2, f);
    CHECK(fs::file_size(dir / "s.bin") == 7 * sizeof(double));
    const auto s = read_snapshot(dir / "s.bin");
    CHECK(s.dimension == 2);
    CHECK(s.nodes_per_axis == 2);
    CHECK(s.field.t == 0.25);
    CHECK(s.field.values == f.values);
    fs::remove_all(dir);
  }

  TEST_CASE("run outputs and manifest") {
    const auto dir = scratch("run");
    auto cfg = testing::config_1d(16, ModelKind::Singular, 1.0, 0.1, 0.0, 0.2);
    cfg.physics.nu = 1.0;
    cfg.integrator.stride = 5;
    const auto tr = simulate(cfg);
    write_outputs(tr, dir);
    CHECK(fs::exists(dir / "diagnostics.csv"));
    const auto snaps = std::distance(fs::directory_iterator(dir / "snapshots"), fs::directory_iterator{});
    CHECK(std::size_t(snaps) == tr.snapshots.size());
    const auto last = read_snapshot(dir / "snapshots" / "snapshot_000000.bin");
    CHECK(last.field.values == tr.physical(0).values);

    std::ifstream in(dir / "manifest.json");
    const auto m = nlohmann::json::parse(in);
    CHECK(m["status"] == "completed");
    CHECK(m["config_hash"] == hash_hex(config_hash(cfg)));
    CHECK(m["steps_taken"] == tr.steps_taken);
    const auto reparsed = parse_config_text(m["config"].get<std::string>());
    CHECK(config_hash(reparsed) == config_hash(cfg));
    fs::remove_all(dir);
  }

  TEST_CASE("a run that blows up in its first step writes only the t=0 row") {
    const auto dir = scratch("blowup");
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.01, 1e308);
    cfg.integrator.dt = 1e308;
    cfg.initial.diameter = 3.0;
    const auto tr = simulate(cfg);
    CHECK(tr.status == TerminationStatus::BlowUp);
    write_outputs(tr, dir);
    const auto rows = read_diagnostics_csv(dir / "diagnostics.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].t == 0.0);
    std::ifstream in(dir / "manifest.json");
    CHECK(nlohmann::json::parse(in)["status"] == "blow-up");
    fs::remove_all(dir);
  }

  TEST_CASE("sweep outputs") {
    const auto dir = scratch("sweep");
    auto cfg = testing::config_1d(16, ModelKind::Regularized, 1.0, 0.1, 0.1, 0.1);
    cfg.output.snapshots = false;
    const auto sw = sweep_epsilon(cfg, {0.4, 0.2, 0.1, 0.05}, 1);
    write_sweep_outputs(sw, dir);
    int rungs = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && e.path().filename().string().rfind("rung_", 0) == 0) ++rungs;
    }
    CHECK(rungs == 4);
    std::ifstream in(dir / "sweep_report.json");
    const auto r = nlohmann::json::parse(in);
    CHECK(r["rungs"].size() == 4);
    CHECK(r["deltas"].size() == 3);
    fs::remove_all(dir);
  }
}
