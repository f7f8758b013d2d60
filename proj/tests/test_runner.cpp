#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "highgain/runner.hpp"

using namespace highgain;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("highgain_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig small(const char* name, double gamma) {
  RunConfig c = preset(name);
  c.process.coupling = gamma;
  c.grid.n = 40;
  c.z_steps = 40;
  return c;
}

}  // namespace

TEST_CASE("number format is lossless") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("zero coupling writes zero modes and passes validation") {
  RunConfig c = small("pdc_paper", 0.0);
  c.output.path = scratch("zero").string();
  c.validate = true;
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  const fs::path dir = c.output.path;
  std::istringstream table(slurp(dir / "modes.csv"));
  std::string line;
  std::getline(table, line);
  CHECK(line == "mode_index,r,efficiency_or_gain,squeezing_db,model");
  int rows = 0;
  while (std::getline(table, line)) {
    ++rows;
    CHECK(line.find("0.0000000000000000e+00,0.0000000000000000e+00,0.0000000000000000e+00") != std::string::npos);
  }
  CHECK(rows == 20);
  CHECK(fs::exists(dir / "shapes" / "rigorous_xi_10.csv"));
  CHECK(fs::exists(dir / "shapes" / "analytic_varphi_1.csv"));
  const auto diag = nlohmann::json::parse(slurp(dir / "diagnostics.json"));
  CHECK(diag["rigorous"]["canonical_errors"]["max"].get<double>() == 0.0);
  CHECK(diag["rigorous"]["unitarity_deviation"].get<double>() == 0.0);
  CHECK(diag["validation"]["passed"].get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical csv") {
  RunConfig c = small("fc_paper", 0.7);
  c.output.path = scratch("det_a").string();
  std::ostringstream log;
  REQUIRE(run(c, log) == kExitOk);
  RunConfig d = c;
  d.output.path = scratch("det_b").string();
  REQUIRE(run(d, log) == kExitOk);
  CHECK(slurp(fs::path(c.output.path) / "modes.csv") == slurp(fs::path(d.output.path) / "modes.csv"));
  CHECK(slurp(fs::path(c.output.path) / "shapes" / "rigorous_psi_1.csv") ==
        slurp(fs::path(d.output.path) / "shapes" / "rigorous_psi_1.csv"));
  fs::remove_all(c.output.path);
  fs::remove_all(d.output.path);
}

TEST_CASE("sweep rows are ordered, thread-independent and monotone in photon number") {
  RunConfig c = small("pdc_paper", 0.0);
  SweepConfig s;
  s.min = 0.1;
  s.max = 1.2;
  s.steps = 6;
  c.sweep = s;
  c.solver.scheme = Scheme::Marching;
  const auto one = run_sweep(c, s.values());
  c.threads = 3;
  const auto three = run_sweep(c, s.values());
  REQUIRE(one.size() == 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].gamma == three[i].gamma);
    CHECK(one[i].rigorous_total == three[i].rigorous_total);
    if (i > 0) {
      CHECK(one[i].analytic_total > one[i - 1].analytic_total);
      CHECK(one[i].rigorous_total > one[i - 1].rigorous_total);
    }
  }
  c.output.path = scratch("sweep").string();
  std::ostringstream log;
  CHECK(run(c, log) == kExitOk);
  CHECK(fs::exists(fs::path(c.output.path) / "sweep.csv"));
  fs::remove_all(c.output.path);
}

TEST_CASE("exit codes") {
  std::ostringstream log;
  RunConfig bad = small("fc_paper", 0.5);
  bad.grid.n = 1;
  CHECK(run(bad, log) == kExitConfig);

  RunConfig unreachable = small("fc_paper", 0.0);
  unreachable.target = TargetConfig{TargetMetric::FirstModeEfficiency, 1.5, Branch::Rising};
  unreachable.output.path = scratch("unreach").string();
  CHECK(run(unreachable, log) == kExitConfig);

  RunConfig stalled = small("fc_paper", 1.0);
  stalled.solver.max_iter = 2;
  stalled.output.path = scratch("stall").string();
  CHECK(run(stalled, log) == kExitNonConvergence);

  RunConfig unwritable = small("fc_paper", 0.5);
  unwritable.output.path = "/proc/highgain/out";
  CHECK(run(unwritable, log) == kExitIo);

  RunConfig strict = small("pdc_paper", 1.5);
  strict.z_steps = 10;
  strict.validate = true;
  strict.output.path = scratch("strict").string();
  CHECK(run(strict, log) == kExitValidation);
  fs::remove_all(unreachable.output.path);
  fs::remove_all(stalled.output.path);
  fs::remove_all(strict.output.path);
}
