#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "msde/config.hpp"

using namespace msde;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "name": "t",
    "experiment": "trace",
    "model": {"slow": {"family": "quadratic", "alpha": [1.0]}, "fast": {"family": "sine"}, "eps": 0.1, "sigma": 0.5},
    "grid": {"dt": 1e-3, "T": 10},
    "filter": {"kind": "exponential", "delta": 1.0},
    "learning_rate": {"gamma": 10, "beta": 10},
    "seed": 3
  })");
}

}  // namespace

TEST_CASE("minimal trace config") {
  const ExperimentConfig c = parse_config(base());
  CHECK(c.kind == ExperimentKind::trace);
  CHECK(c.model.fast.family() == FastFamily::sine);
  CHECK(c.grid().n_steps == 10000);
  CHECK(c.total_steps() == 10000);
  CHECK(c.seed == 3);
  CHECK(c.basis().size() == 1);
  CHECK(c.output == "t.csv");
  CHECK(c.resolved["grid"]["n_steps"] == 10000);
  CHECK(c.resolved["filter"]["delta_effective"] == 1.0);
}

TEST_CASE("dt as a power of eps") {
  json d = base();
  d["grid"]["dt"] = "eps^3";
  CHECK(parse_config(d).dt == doctest::Approx(1e-3));
  d["grid"]["dt"] = "eps^x";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d["grid"]["dt"] = -1.0;
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
}

TEST_CASE("unknown and malformed fields are rejected") {
  json d = base();
  d["grid"]["steps"] = 5;
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["typo"] = 1;
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["model"]["eps"] = "small";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["model"]["slow"]["family"] = "quartic";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["experiment"] = "sweep";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["check"] = {{"slope_rnage", {0, 1}}};
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d = base();
  d["initial"] = {0.0, 1.0};
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(json::array()), std::invalid_argument);
}

TEST_CASE("kind-specific validation") {
  json d = base();
  d["experiment"] = "rate_study";
  d["replicas"] = 1;
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d["replicas"] = 4;
  CHECK(parse_config(d).total_steps() == 40000);

  d = base();
  d["experiment"] = "xi_sweep";
  d["filter"]["kind"] = "none";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);

  d = base();
  d["experiment"] = "drift_function";
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d["basis"] = {{"kind", "monomials"}, {"n", 4}};
  d["basis_sizes"] = {4, 0};
  CHECK_THROWS_AS(parse_config(d), std::invalid_argument);
  d["basis_sizes"] = {4, 3};
  CHECK(parse_config(d).total_steps() == 20000);
}

TEST_CASE("xi grid defaults to 15 points in [0.2, 2.8]") {
  json d = base();
  d["experiment"] = "xi_sweep";
  const ExperimentConfig c = parse_config(d);
  REQUIRE(c.xi_grid.size() == 15);
  CHECK(c.xi_grid.front() == doctest::Approx(0.2));
  CHECK(c.xi_grid.back() == doctest::Approx(2.8));
}

TEST_CASE("full overrides are applied only on request") {
  json d = base();
  d["full"] = {{"grid", {{"T", 100}}}};
  CHECK(parse_config(d).final_time == 10.0);
  const ExperimentConfig full = parse_config(d, true);
  CHECK(full.final_time == 100.0);
  CHECK(full.dt == 1e-3);
  CHECK_FALSE(full.resolved.contains("full"));
}

TEST_CASE("shipped configs parse in both modes") {
  for (const auto& entry : std::filesystem::directory_iterator(MSDE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
    CHECK_NOTHROW(load_config(entry.path(), true));
  }
}

TEST_CASE("config files may contain comments") {
  const auto path = std::filesystem::temp_directory_path() / "msde_config_comment.json";
  {
    std::ofstream os(path);
    os << "// leading comment\n" << base().dump(2) << '\n';
  }
  CHECK(load_config(path).name == "t");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), std::runtime_error);
}

TEST_CASE("x grid values") {
  const std::vector<double> x = XGrid{-1.5, 1.5, 61}.values();
  REQUIRE(x.size() == 61);
  CHECK(x.front() == -1.5);
  CHECK(x.back() == doctest::Approx(1.5));
  CHECK(x[30] == doctest::Approx(0.0).scale(1.0));
}
