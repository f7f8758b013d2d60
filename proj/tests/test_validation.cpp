#include <doctest.h>

#include <cmath>

#include "highgain/analytic.hpp"
#include "highgain/errors.hpp"
#include "highgain/validation.hpp"

using namespace highgain;

namespace {

ProcessSpec preset_spec(ProcessKind kind) {
  ProcessSpec s;
  s.kind = kind;
  s.sigma = kind == ProcessKind::FC ? 0.98190 : 0.96231155;
  s.kp_slope = 3.0;
  s.k1_slope = 4.5;
  s.k2_slope = 1.5;
  s.length = 2.0;
  return s;
}

}  // namespace

TEST_CASE("find_coupling round-trips through the analytic model") {
  const ProcessSpec fc = preset_spec(ProcessKind::FC);
  const FrequencyGrid gf = default_grid(fc, 80);
  for (double target : {0.064, 0.5, 1.0}) {
    const double gamma = find_coupling(fc, gf, target, TargetMetric::FirstModeEfficiency);
    const ModeSpectrum m = analytic_solve(fc.with_coupling(gamma), gf);
    CHECK(analytic_metric(ProcessKind::FC, m.r, TargetMetric::FirstModeEfficiency) ==
          doctest::Approx(target).epsilon(1e-10));
  }
  const double rising = find_coupling(fc, gf, 0.3, TargetMetric::FirstModeEfficiency, Branch::Rising);
  const double falling = find_coupling(fc, gf, 0.3, TargetMetric::FirstModeEfficiency, Branch::Falling);
  const double peak = find_coupling(fc, gf, 1.0, TargetMetric::FirstModeEfficiency);
  CHECK(rising < peak);
  CHECK(falling > peak);
  CHECK(rising + falling == doctest::Approx(2.0 * peak));

  const ProcessSpec pdc = preset_spec(ProcessKind::PDC);
  const FrequencyGrid gp = default_grid(pdc, 80);
  for (double target : {0.07, 2.8, 39.39}) {
    const double gamma = find_coupling(pdc, gp, target, TargetMetric::MeanPhotons);
    const ModeSpectrum m = analytic_solve(pdc.with_coupling(gamma), gp);
    CHECK(analytic_metric(ProcessKind::PDC, m.r, TargetMetric::MeanPhotons) == doctest::Approx(target).epsilon(1e-9));
  }
  const double g12 = find_coupling(pdc, gp, 12.0, TargetMetric::SqueezingDb);
  CHECK(squeezing_db(analytic_solve(pdc.with_coupling(g12), gp).r.front()) == doctest::Approx(12.0).epsilon(1e-10));
}

TEST_CASE("find_coupling edge cases") {
  const ProcessSpec fc = preset_spec(ProcessKind::FC);
  const ProcessSpec pdc = preset_spec(ProcessKind::PDC);
  const FrequencyGrid g = default_grid(fc, 40);
  CHECK(find_coupling(fc, g, 0.0, TargetMetric::FirstModeEfficiency) == 0.0);
  CHECK_THROWS_AS(find_coupling(fc, g, 1.2, TargetMetric::FirstModeEfficiency), TargetUnreachable);
  CHECK_THROWS_AS(find_coupling(fc, g, 1.0, TargetMetric::MeanPhotons), InvalidArgument);
  CHECK_THROWS_AS(find_coupling(pdc, g, 0.5, TargetMetric::FirstModeEfficiency), InvalidArgument);
  CHECK_THROWS_AS(find_coupling(pdc, g, 1.0, TargetMetric::MeanPhotons, Branch::Falling), InvalidArgument);
  CHECK_THROWS_AS(find_coupling(pdc, g, -1.0, TargetMetric::MeanPhotons), InvalidArgument);
}

TEST_CASE("models agree at low gain and separate at high gain") {
  const ProcessSpec fc = preset_spec(ProcessKind::FC);
  const FrequencyGrid g = default_grid(fc, 80);
  const ZGrid z(80, fc.length);
  const ComparisonReport low = compare_models(fc.with_coupling(0.05), g, z, {1e-10, 100, Scheme::Picard});
  for (std::size_t k = 0; k < 3; ++k) CHECK(low.rigorous.r[k] == doctest::Approx(low.analytic.r[k]).epsilon(5e-3));
  CHECK(low.first_input_overlap > 0.9999);
  CHECK(low.first_output_overlap > 0.9999);

  const double peak = find_coupling(fc, g, 1.0, TargetMetric::FirstModeEfficiency);
  const ComparisonReport high = compare_models(fc.with_coupling(peak), g, z, {1e-8, 200, Scheme::Marching});
  CHECK(high.analytic_metrics.first_mode_efficiency == doctest::Approx(1.0));
  CHECK(high.rigorous_metrics.first_mode_efficiency < 0.95);
  // Time ordering narrows the input mode and separates input from output shapes.
  CHECK(high.first_input_overlap < 0.999);
}

TEST_CASE("grid convergence table") {
  const ProcessSpec pdc = preset_spec(ProcessKind::PDC).with_coupling(0.5);
  ConvergenceOptions opt;
  opt.resolutions = {40, 80};
  opt.window_scales = {1.0};
  opt.solver.scheme = Scheme::Marching;
  const ConvergenceTable t = grid_convergence(pdc, ConvergenceMetric::FirstModeR, opt);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::isnan(t.rows[0].relative_change));
  CHECK(t.rows[1].relative_change < 0.05);
  CHECK(t.rows[1].n == 80);
  opt.model = Model::Analytic;
  const ConvergenceTable a = grid_convergence(pdc, ConvergenceMetric::MeanPhotons, opt);
  CHECK(a.rows[1].value > 0.0);
  CHECK_THROWS_AS(grid_convergence(pdc, ConvergenceMetric::FirstModeR, ConvergenceOptions{{}, {1.0}}), InvalidArgument);
}

TEST_CASE("enum names round-trip") {
  for (Model m : {Model::Analytic, Model::Rigorous, Model::Both}) CHECK(parse_model(to_string(m)) == m);
  for (TargetMetric t : {TargetMetric::FirstModeEfficiency, TargetMetric::MeanPhotons, TargetMetric::SqueezingDb}) {
    CHECK(parse_target_metric(to_string(t)) == t);
  }
  CHECK(parse_branch("falling") == Branch::Falling);
  CHECK_THROWS_AS(parse_model("exact"), InvalidArgument);
}
