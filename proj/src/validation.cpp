#include "highgain/validation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "highgain/analytic.hpp"
#include "highgain/errors.hpp"

namespace highgain {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_photons(const std::vector<double>& s, double gamma) {
  double total = 0.0;
  for (double sk : s) {
    const double v = std::sinh(gamma * sk);
    total += v * v;
  }
  return total;
}

double first_r(const std::vector<double>& r) { return r.empty() ? 0.0 : r.front(); }

void check_metric_kind(ProcessKind kind, TargetMetric metric) {
  const bool fc_metric = metric == TargetMetric::FirstModeEfficiency;
  if (fc_metric != (kind == ProcessKind::FC)) {
    throw InvalidArgument(std::string(to_string(metric)) + " is not defined for " + std::string(to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Analytic:
      return "analytic";
    case Model::Rigorous:
      return "rigorous";
    case Model::Both:
      return "both";
  }
  return "both";
}

Model parse_model(std::string_view text) {
  if (text == "analytic") return Model::Analytic;
  if (text == "rigorous") return Model::Rigorous;
  if (text == "both") return Model::Both;
  throw InvalidArgument("unknown model '" + std::string(text) + "' (expected analytic, rigorous or both)");
}

std::string_view to_string(TargetMetric metric) {
  switch (metric) {
    case TargetMetric::FirstModeEfficiency:
      return "first_mode_efficiency";
    case TargetMetric::MeanPhotons:
      return "mean_photons";
    case TargetMetric::SqueezingDb:
      return "squeezing_db";
  }
  return "first_mode_efficiency";
}

TargetMetric parse_target_metric(std::string_view text) {
  if (text == "first_mode_efficiency") return TargetMetric::FirstModeEfficiency;
  if (text == "mean_photons") return TargetMetric::MeanPhotons;
  if (text == "squeezing_db") return TargetMetric::SqueezingDb;
  throw InvalidArgument("unknown target metric '" + std::string(text) +
                        "' (expected first_mode_efficiency, mean_photons or squeezing_db)");
}

std::string_view to_string(Branch branch) { return branch == Branch::Rising ? "rising" : "falling"; }

Branch parse_branch(std::string_view text) {
  if (text == "rising") return Branch::Rising;
  if (text == "falling") return Branch::Falling;
  throw InvalidArgument("unknown branch '" + std::string(text) + "' (expected rising or falling)");
}

double analytic_metric(ProcessKind kind, const std::vector<double>& r, TargetMetric metric) {
  check_metric_kind(kind, metric);
  switch (metric) {
    case TargetMetric::FirstModeEfficiency: {
      const double s = std::sin(first_r(r));
      return s * s;
    }
    case TargetMetric::MeanPhotons:
      return mean_photons(r, 1.0);
    case TargetMetric::SqueezingDb:
      return squeezing_db(first_r(r));
  }
  return 0.0;
}

double find_coupling(const ProcessSpec& spec, const FrequencyGrid& grid, double target, TargetMetric metric,
                     Branch branch) {
  spec.validate();
  check_metric_kind(spec.kind, metric);
  if (!std::isfinite(target) || target < 0.0) throw InvalidArgument("target must be finite and >= 0");
  if (branch == Branch::Falling && metric != TargetMetric::FirstModeEfficiency) {
    throw InvalidArgument("the falling branch only applies to first_mode_efficiency");
  }
  if (target == 0.0 && branch == Branch::Rising) return 0.0;

  const std::vector<double> s = unit_schmidt_values(spec, grid);
  const double s1 = s.empty() ? 0.0 : s.front();
  if (!(s1 > 0.0)) throw TargetUnreachable("the process has no coupling on this grid");

  switch (metric) {
    case TargetMetric::FirstModeEfficiency: {
      if (target > 1.0) throw TargetUnreachable("first-mode efficiency cannot exceed 1");
      const double r1 = std::asin(std::sqrt(target));
      return (branch == Branch::Rising ? r1 : std::numbers::pi - r1) / s1;
    }
    case TargetMetric::SqueezingDb:
      return target * std::numbers::ln10 / 20.0 / s1;
    case TargetMetric::MeanPhotons: {
      double lo = 0.0;
      double hi = 1.0 / s1;
      while (mean_photons(s, hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(mean_photons(s, hi))) throw TargetUnreachable("mean photon number overflows");
      }
      for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_photons(s, mid) < target ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

ComparisonReport compare_models(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                                const SolverOptions& options) {
  ComparisonReport rep;
  rep.spec = spec;
  rep.analytic = analytic_solve(spec, grid);
  rep.analytic_metrics = derived_metrics(rep.analytic);

  const auto start = std::chrono::steady_clock::now();
  rep.transfer = solve_rigorous(spec, grid, zgrid, options);
  rep.rigorous = bloch_messiah(rep.transfer);
  rep.rigorous_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.rigorous_metrics = derived_metrics(rep.rigorous);
  rep.canonical = canonical_error(rep.transfer);
  rep.symmetry = symmetry_check(rep.transfer, rep.rigorous);

  rep.first_input_overlap = std::abs(mode_overlap(grid, rep.analytic.in_a.col(0), rep.rigorous.in_a.col(0)));
  rep.first_output_overlap = std::abs(mode_overlap(grid, rep.analytic.out_a.col(0), rep.rigorous.out_a.col(0)));
  rep.analytic_width = rms_width(grid, rep.analytic.in_a.col(0));
  rep.rigorous_input_width = rms_width(grid, rep.rigorous.in_a.col(0));
  rep.rigorous_output_width = rms_width(grid, rep.rigorous.out_a.col(0));
  return rep;
}

std::string_view to_string(ConvergenceMetric metric) {
  switch (metric) {
    case ConvergenceMetric::FirstModeR:
      return "first_mode_r";
    case ConvergenceMetric::FirstModeEfficiency:
      return "first_mode_efficiency";
    case ConvergenceMetric::MeanPhotons:
      return "mean_photons";
    case ConvergenceMetric::CanonicalError:
      return "canonical_error";
  }
  return "first_mode_r";
}

ConvergenceMetric parse_convergence_metric(std::string_view text) {
  if (text == "first_mode_r") return ConvergenceMetric::FirstModeR;
  if (text == "first_mode_efficiency") return ConvergenceMetric::FirstModeEfficiency;
  if (text == "mean_photons") return ConvergenceMetric::MeanPhotons;
  if (text == "canonical_error") return ConvergenceMetric::CanonicalError;
  throw InvalidArgument("unknown convergence metric '" + std::string(text) + "'");
}

ConvergenceTable grid_convergence(const ProcessSpec& spec, ConvergenceMetric metric,
                                  const ConvergenceOptions& options) {
  spec.validate();
  if (options.resolutions.empty() || options.window_scales.empty()) {
    throw InvalidArgument("grid_convergence needs at least one resolution and one window");
  }
  const bool analytic = options.model == Model::Analytic;
  ConvergenceTable table;
  table.metric = metric;
  for (double scale : options.window_scales) {
    if (!(scale > 0.0)) throw InvalidArgument("window scales must be positive");
    const double half_width = scale * default_half_width(spec);
    double previous = kNaN;
    std::size_t previous_n = 0;
    for (std::size_t n : options.resolutions) {
      const FrequencyGrid grid = FrequencyGrid::centered(n, half_width);
      std::vector<double> r;
      double canon = 0.0;
      if (analytic) {
        r = analytic_solve(spec, grid).r;
      } else {
        const TransferMatrices tm = solve_rigorous(spec, grid, ZGrid(n, spec.length), options.solver);
        canon = canonical_error(tm).max();
        if (metric != ConvergenceMetric::CanonicalError) r = bloch_messiah(tm).r;
      }
      double value = 0.0;
      switch (metric) {
        case ConvergenceMetric::FirstModeR:
          value = first_r(r);
          break;
        case ConvergenceMetric::FirstModeEfficiency: {
          const double s = spec.kind == ProcessKind::FC ? std::sin(first_r(r)) : std::sinh(first_r(r));
          value = s * s;
          break;
        }
        case ConvergenceMetric::MeanPhotons:
          // FC: total converted fraction sum sin^2 r_k.
          value = 0.0;
          for (double rk : r) value += spec.kind == ProcessKind::PDC ? std::pow(std::sinh(rk), 2) : std::pow(std::sin(rk), 2);
          break;
        case ConvergenceMetric::CanonicalError:
          value = canon;
          break;
      }
      ConvergenceRow row;
      row.n = n;
      row.m = n;
      row.half_width = half_width;
      row.value = value;
      row.relative_change = kNaN;
      row.richardson = kNaN;
      if (previous_n != 0) {
        const double diff = std::abs(value - previous);
        row.relative_change = value != 0.0 ? diff / std::abs(value) : diff;
        const double ratio = static_cast<double>(n) / static_cast<double>(previous_n);
        row.richardson = value + (value - previous) / (ratio * ratio - 1.0);
      }
      table.rows.push_back(row);
      previous = value;
      previous_n = n;
    }
  }
  return table;
}

}  // namespace highgain
