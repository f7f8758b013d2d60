#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "highgain/bloch_messiah.hpp"
#include "highgain/modes.hpp"
#include "highgain/rigorous.hpp"

namespace highgain {

enum class Model { Analytic, Rigorous, Both };

std::string_view to_string(Model model);
Model parse_model(std::string_view text);

/// Quantities find_coupling can anchor on. All are evaluated on the analytic model.
enum class TargetMetric { FirstModeEfficiency, MeanPhotons, SqueezingDb };

std::string_view to_string(TargetMetric metric);
TargetMetric parse_target_metric(std::string_view text);

/// FC efficiency sin^2(gamma s_1) is periodic; Rising picks the first solution,
/// Falling the one just past the first maximum.
enum class Branch { Rising, Falling };

std::string_view to_string(Branch branch);
Branch parse_branch(std::string_view text);

/// Analytic value of `metric` for Schmidt amplitudes r (descending).
///   first_mode_efficiency  sin^2 r_1 (FC only)
///   mean_photons           sum sinh^2 r_k (PDC only)
///   squeezing_db           20 r_1 / ln 10 (PDC only)
double analytic_metric(ProcessKind kind, const std::vector<double>& r, TargetMetric metric);

/// Coupling gamma at which the analytic model reaches `target`.
/// Uses r_k = gamma s_k: closed form for efficiency and squeezing, bisection on
/// sum sinh^2(gamma s_k) for the photon number. Relative accuracy 1e-12.
/// Throws TargetUnreachable above the metric's supremum and InvalidArgument for
/// a metric that does not apply to the process kind.
double find_coupling(const ProcessSpec& spec, const FrequencyGrid& grid, double target, TargetMetric metric,
                     Branch branch = Branch::Rising);

struct ComparisonReport {
  ProcessSpec spec;
  ModeSpectrum analytic;
  ModeSpectrum rigorous;
  MetricsReport analytic_metrics;
  MetricsReport rigorous_metrics;
  TransferMatrices transfer;
  CanonicalErrors canonical;
  SymmetryReport symmetry;
  /// |dnu <psi_1^analytic, psi_1^rigorous>| and the same for the output mode varphi_1.
  double first_input_overlap = 0.0;
  double first_output_overlap = 0.0;
  double analytic_width = 0.0;         ///< RMS width of analytic psi_1
  double rigorous_input_width = 0.0;   ///< RMS width of rigorous psi_1
  double rigorous_output_width = 0.0;  ///< RMS width of rigorous varphi_1
  double rigorous_seconds = 0.0;
};

/// Both models at identical spec and grid.
ComparisonReport compare_models(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                                const SolverOptions& options = {});

/// Quantities tracked by grid_convergence.
enum class ConvergenceMetric { FirstModeR, FirstModeEfficiency, MeanPhotons, CanonicalError };

std::string_view to_string(ConvergenceMetric metric);
ConvergenceMetric parse_convergence_metric(std::string_view text);

struct ConvergenceOptions {
  std::vector<std::size_t> resolutions{100, 200, 300, 500};  ///< n = m at each step
  std::vector<double> window_scales{1.0, 2.0};                ///< multiples of default_half_width
  Model model = Model::Rigorous;                              ///< Both is treated as Rigorous
  SolverOptions solver{};
};

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double half_width = 0.0;
  double value = 0.0;
  /// |v - v_prev| / |v| against the previous resolution at the same window (NaN for the first).
  double relative_change = 0.0;
  /// Second-order Richardson estimate from this and the previous resolution (NaN for the first).
  double richardson = 0.0;
};

struct ConvergenceTable {
  ConvergenceMetric metric = ConvergenceMetric::FirstModeR;
  std::vector<ConvergenceRow> rows;
};

/// Metric at every (window, resolution) pair with step-to-step changes.
ConvergenceTable grid_convergence(const ProcessSpec& spec, ConvergenceMetric metric,
                                  const ConvergenceOptions& options = {});

}  // namespace highgain
