#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "highgain/config.hpp"
#include "highgain/errors.hpp"

using namespace highgain;

TEST_CASE("presets") {
  const RunConfig fc = preset("fc_paper");
  CHECK(fc.process.kind == ProcessKind::FC);
  CHECK(fc.process.sigma == 0.98190);
  CHECK(fc.process.kp_slope == 3.0);
  CHECK(fc.process.k1_slope == 4.5);
  CHECK(fc.process.k2_slope == 1.5);
  CHECK(fc.process.length == 2.0);
  CHECK(fc.process.coupling == 0.0);
  const RunConfig pdc = preset("pdc_paper");
  CHECK(pdc.process.kind == ProcessKind::PDC);
  CHECK(pdc.process.sigma == 0.96231155);
  CHECK_THROWS_AS(preset("shg"), InvalidArgument);
}

TEST_CASE("config round-trips field-identically") {
  RunConfig c = preset("pdc_paper");
  c.process.coupling = 0.1 + 0.2;  // not exactly representable in short decimal
  c.grid.n = 321;
  c.grid.nu_min = -6.123456789012345;
  c.grid.nu_max = 7.0;
  c.z_steps = 123;
  c.solver = {1e-9, 77, Model::Rigorous, Scheme::Marching};
  c.output = {"somewhere/else", OutputFormat::Json, 4};
  SweepConfig s;
  s.min = 0.1;
  s.max = 1.7;
  s.steps = 20;
  c.sweep = s;
  c.target = TargetConfig{TargetMetric::MeanPhotons, 2.8, Branch::Rising};
  c.validate = true;
  c.threads = 3;
  const RunConfig back = parse_config(dump_config(c));
  CHECK(back == c);
  CHECK(dump_config(back) == dump_config(c));

  RunConfig list = preset("fc_paper");
  SweepConfig l;
  l.gammas = {0.1, 0.2, 0.35};
  list.sweep = l;
  CHECK(parse_config(dump_config(list)) == list);

  const auto path = std::filesystem::temp_directory_path() / "highgain_roundtrip.json";
  save_config(c, path.string());
  CHECK(load_config(path.string()) == c);
  std::filesystem::remove(path);
}

TEST_CASE("sweep ranges are inclusive") {
  SweepConfig s;
  s.min = 1.0;
  s.max = 2.0;
  s.steps = 5;
  const auto v = s.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 1.0);
  CHECK(v.back() == 2.0);
  CHECK(v[2] == doctest::Approx(1.5));
  s.steps = 1;
  CHECK(s.values() == std::vector<double>{1.0});
}

TEST_CASE("parse errors name the field") {
  const std::string base = R"({"process": {"kind": "FC", "sigma": 1.0, "coupling": 0.5, "kp_slope": 3,
                               "k1_slope": 4.5, "k2_slope": 1.5, "length": 2})";
  CHECK_NOTHROW(parse_config(base + "}"));
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "grid": {"n": 1}})"), doctest::Contains("grid.n"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "grid": {"nu_min": -1}})"), doctest::Contains("grid.nu_m"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "solver": {"model": "exact"}})"), doctest::Contains("solver.model"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "output": {"fmt": "csv"}})"), doctest::Contains("output.fmt"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "zgrid": {"m": -4}})"), doctest::Contains("zgrid.m"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"process": {"kind": "FC", "sigma": -1, "coupling": 0, "kp_slope": 3,
                               "k1_slope": 4.5, "k2_slope": 1.5, "length": 2}})"),
                       doctest::Contains("process.sigma"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(R"({"process": {"kind": "SHG"}})"), doctest::Contains("process.kind"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config("{"), doctest::Contains("JSON"), InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_config(base + R"(, "threads": 0})"), doctest::Contains("threads"), InvalidArgument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("committed preset fixtures parse") {
  for (const char* name : {"fc_paper", "pdc_paper"}) {
    const std::string path = std::string(HIGHGAIN_SOURCE_DIR) + "/configs/" + name + ".json";
    const RunConfig c = load_config(path);
    CHECK(c.process.kind == preset(name).process.kind);
    CHECK(c.process.sigma == preset(name).process.sigma);
    CHECK(c.grid.n == 500);
    CHECK(c.z_steps == 500);
  }
}
