#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "highgain/process.hpp"
#include "highgain/rigorous.hpp"
#include "highgain/validation.hpp"

namespace highgain {

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view text);

struct GridConfig {
  std::size_t n = 200;
  // Both bounds or neither; absent means +-default_half_width(process).
  std::optional<double> nu_min;
  std::optional<double> nu_max;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 200;
  Model model = Model::Both;
  Scheme scheme = Scheme::Picard;
};

struct OutputConfig {
  std::string path = "highgain_out";
  OutputFormat format = OutputFormat::Csv;
  std::size_t modes = 10;  ///< leading modes written to the tables and shape files
};

/// Either an explicit coupling list or an evenly spaced range (inclusive).
struct SweepConfig {
  std::vector<double> gammas;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::size_t> steps;

  std::vector<double> values() const;
};

struct TargetConfig {
  TargetMetric metric = TargetMetric::FirstModeEfficiency;
  double value = 0.0;
  Branch branch = Branch::Rising;
};

/// One batch run. On disk this is a JSON object with the sections
/// process, grid, zgrid, solver, output and the optional sweep and target;
/// see configs/ for the canonical layout.
struct RunConfig {
  ProcessSpec process;
  GridConfig grid;
  std::size_t z_steps = 200;
  SolverConfig solver;
  OutputConfig output;
  std::optional<SweepConfig> sweep;
  std::optional<TargetConfig> target;
  bool validate = false;
  std::size_t threads = 1;

  /// Enforce every field invariant; throws InvalidArgument naming the field.
  void check() const;

  FrequencyGrid frequency_grid() const;
  ZGrid z_grid() const;
  SolverOptions solver_options() const;
};

bool operator==(const SweepConfig& a, const SweepConfig& b);
bool operator==(const TargetConfig& a, const TargetConfig& b);
bool operator==(const RunConfig& a, const RunConfig& b);

/// Known presets: fc_paper, pdc_paper (coupling left at 0).
RunConfig preset(std::string_view name);

/// Parse and check. Unknown keys are rejected so typos surface.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

std::string dump_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

}  // namespace highgain
