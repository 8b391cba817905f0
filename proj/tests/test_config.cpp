#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "nvpol/config.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/errors.hpp"

using namespace nvpol;
using namespace nvpol::cli;

namespace {

RunConfig variant_table() {
  RunConfig c;
  c.environment.kind = EnvironmentSource::Kind::Table1;
  c.environment.n = 10;
  c.b_z_gauss = 25.0;
  c.polarization.profile = PolarizationSpec::Profile::Uniform;
  c.polarization.p = 0.5;
  c.tau_grid = {0.0, 50.0, 128};
  c.t_grid = {0.0, 400.0, 256};
  c.method = est::Method::TimeIndependent;
  c.sin_floor = 0.1;
  c.per_tau = true;
  c.seed = 9;
  c.out = "bound.csv";
  return c;
}

RunConfig variant_generated() {
  RunConfig c;
  c.environment.kind = EnvironmentSource::Kind::Generated;
  c.environment.n = 6;
  c.environment.seed = 31;
  c.environment.shell_min = 0.35;
  c.environment.shell_max = 0.9;
  c.polarization.profile = PolarizationSpec::Profile::Graded;
  c.polarization.mean = 0.4;
  c.polarization.sigma = 0.2;
  c.polarization.seed = 5;
  c.p_list = {0.1, 0.5, 1.0};
  return c;
}

RunConfig variant_file() {
  RunConfig c;
  c.environment.kind = EnvironmentSource::Kind::File;
  c.environment.path = "/tmp/env.json";
  c.polarization.profile = PolarizationSpec::Profile::Explicit;
  c.polarization.values = {0.2, -0.3, 1.0};
  return c;
}

}  // namespace

TEST_CASE("run configurations survive a JSON round-trip") {
  for (const RunConfig& c : {RunConfig{}, variant_table(), variant_generated(), variant_file()}) {
    const RunConfig back = config_from_json(to_json(c));
    CHECK(back == c);
    // serialization is canonical: a second trip is textually identical
    CHECK(to_json(back) == to_json(c));
  }
}

TEST_CASE("config parsing accepts partial documents and fills defaults") {
  const RunConfig c = config_from_json(R"({"b_z_gauss": 50})");
  CHECK(c.b_z_gauss == 50.0);
  CHECK(c.environment.kind == EnvironmentSource::Kind::Table1);
  CHECK(c.environment.n == 15);
  CHECK(c.tau_grid == est::GridRange{0.0, 100.0, 512});
  CHECK(c.method == est::Method::TimeDependent);
  CHECK(c.sin_floor == 0.05);
  CHECK_FALSE(c.per_tau);
}

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"unknown_key": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"environment": {"sourc": "table1"}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"environment": {"source": "tables"}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"polarization": {"profile": "flat"}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"tau_grid": {"min": 0, "maximum": 9}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"method": "both"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"b_z_gauss": -5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"environment": {"shell": [0.3]}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"b_z_gauss": "high"})"), ConfigError);
}

TEST_CASE("config files load through the same validation") {
  const auto path = std::filesystem::temp_directory_path() /
                    ("nvpol-cfg-" + std::to_string(::getpid()) + ".cfg");
  {
    std::ofstream out(path);
    out << to_json(variant_generated());
  }
  CHECK(load_config(path.string()) == variant_generated());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config("/nonexistent/nvpol.cfg"), IoError);
}

TEST_CASE("overrides patch one field and revalidate") {
  RunConfig c;
  apply_override(c, "environment.n=10");
  CHECK(c.environment.n == 10);
  apply_override(c, "b_z_gauss=25");
  CHECK(c.b_z_gauss == 25.0);
  apply_override(c, "tau_grid.points=64");
  CHECK(c.tau_grid.points == 64);
  apply_override(c, "method=time-independent");  // bare string needs no quotes
  CHECK(c.method == est::Method::TimeIndependent);
  apply_override(c, "polarization.profile=graded");
  apply_override(c, "polarization.mean=0.4");
  CHECK(c.polarization.profile == PolarizationSpec::Profile::Graded);
  CHECK(c.polarization.mean == 0.4);
  apply_override(c, "p_list=[0.5,1.0]");
  CHECK(c.p_list == std::vector<double>{0.5, 1.0});
  apply_override(c, "per_tau=true");
  CHECK(c.per_tau);
  apply_override(c, "out=run.csv");
  CHECK(c.out == "run.csv");
  apply_override(c, "environment.shell=[0.4,1.1]");
  CHECK(c.environment.shell_min == 0.4);
  CHECK(c.environment.shell_max == 1.1);
}

TEST_CASE("bad overrides are rejected without changing the config") {
  RunConfig c;
  const RunConfig before = c;
  CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "typo_key=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "environment.typo=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "environment..n=5"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "method=sideways"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "b_z_gauss=-3"), ConfigError);
  CHECK(c == before);
}

TEST_CASE("build_environment materializes each source kind") {
  SUBCASE("reference table with truncation and polarization") {
    RunConfig c;
    c.environment.n = 5;
    c.b_z_gauss = 25.0;
    c.polarization.p = 0.5;
    const env::Environment e = build_environment(c);
    REQUIRE(e.n() == 5);
    CHECK(e.b_z_gauss == 25.0);
    for (const auto& s : e.spins) CHECK(s.polarization == 0.5);
  }
  SUBCASE("reference table bounds n") {
    RunConfig c;
    c.environment.n = 16;
    CHECK_THROWS_AS(build_environment(c), ConfigError);
    c.environment.n = 0;
    CHECK_THROWS_AS(build_environment(c), ConfigError);
  }
  SUBCASE("generated source") {
    RunConfig c = variant_generated();
    const env::Environment e = build_environment(c);
    REQUIRE(e.n() == 6);
    // graded profile applied on top
    double mean = 0.0;
    for (const auto& s : e.spins) mean += s.polarization;
    CHECK(mean / 6.0 == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("file source round-trips an environment") {
    const auto path = std::filesystem::temp_directory_path() /
                      ("nvpol-envsrc-" + std::to_string(::getpid()) + ".json");
    env::Environment stored = env::load_table1().truncated(4);
    stored.b_z_gauss = 10.0;
    env::save_environment(stored, path.string());

    RunConfig c;
    c.environment.kind = EnvironmentSource::Kind::File;
    c.environment.path = path.string();
    c.b_z_gauss = 77.0;  // run-time field wins over the stored one
    c.polarization.p = 1.0;
    const env::Environment e = build_environment(c);
    REQUIRE(e.n() == 4);
    CHECK(e.b_z_gauss == 77.0);
    for (const auto& s : e.spins) CHECK(s.polarization == 1.0);
    std::filesystem::remove(path);
  }
  SUBCASE("file source requires a path") {
    RunConfig c;
    c.environment.kind = EnvironmentSource::Kind::File;
    CHECK_THROWS_AS(build_environment(c), ConfigError);
  }
}

TEST_CASE("grid_values expands ranges inclusively") {
  const auto g = grid_values(est::GridRange{0.0, 10.0, 5});
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 10.0);
  CHECK(grid_values(est::GridRange{3.0, 9.0, 1}) == std::vector<double>{3.0});
  CHECK_THROWS_AS(grid_values(est::GridRange{0.0, 1.0, 0}), GridInvalid);
}
