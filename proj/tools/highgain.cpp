// Batch front-end: load a config or preset, apply flag overrides, run.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "highgain/config.hpp"
#include "highgain/errors.hpp"
#include "highgain/runner.hpp"

namespace {

using namespace highgain;

highgain::SweepConfig parse_sweep(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos) throw InvalidArgument("--sweep expects MIN:MAX:STEPS, got '" + text + "'");
  SweepConfig s;
  try {
    s.min = std::stod(text.substr(0, a));
    s.max = std::stod(text.substr(a + 1, b - a - 1));
    const long steps = std::stol(text.substr(b + 1));
    if (steps < 1) throw InvalidArgument("--sweep STEPS must be >= 1");
    s.steps = static_cast<std::size_t>(steps);
  } catch (const std::logic_error&) {
    throw InvalidArgument("--sweep expects MIN:MAX:STEPS, got '" + text + "'");
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-gain frequency conversion and down-conversion simulator"};

  std::string config_path;
  std::string preset_name;
  std::optional<std::string> model;
  std::optional<std::string> scheme;
  std::optional<double> gamma;
  std::optional<std::string> target_metric;
  std::optional<double> target_value;
  std::optional<std::string> branch;
  std::optional<std::size_t> grid_n;
  std::optional<double> nu_min;
  std::optional<double> nu_max;
  std::optional<std::size_t> z_steps;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> sweep;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> modes;
  std::string write_config;
  bool validate = false;

  auto* cfg_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "Built-in configuration")
      ->check(CLI::IsMember({"fc_paper", "pdc_paper"}))
      ->excludes(cfg_opt);
  app.add_option("--model", model, "analytic | rigorous | both")->check(CLI::IsMember({"analytic", "rigorous", "both"}));
  app.add_option("--scheme", scheme, "Rigorous solver: picard | marching")
      ->check(CLI::IsMember({"picard", "marching", "march"}));
  app.add_option("--gamma", gamma, "Coupling strength");
  auto* metric_opt = app.add_option("--target-metric", target_metric,
                                    "first_mode_efficiency (FC) | mean_photons | squeezing_db (PDC)");
  auto* value_opt = app.add_option("--target-value", target_value, "Target value; sets gamma via find_coupling");
  metric_opt->needs(value_opt);
  value_opt->needs(metric_opt);
  app.add_option("--branch", branch, "rising | falling (FC efficiency only)")
      ->check(CLI::IsMember({"rising", "falling"}))
      ->needs(metric_opt);
  app.add_option("--grid-n", grid_n, "Frequency samples");
  auto* min_opt = app.add_option("--nu-min", nu_min, "Lower frequency bound");
  auto* max_opt = app.add_option("--nu-max", nu_max, "Upper frequency bound");
  min_opt->needs(max_opt);
  max_opt->needs(min_opt);
  app.add_option("--z-steps", z_steps, "Propagation samples");
  app.add_option("--tol", tol, "Picard relative tolerance");
  app.add_option("--max-iter", max_iter, "Picard iteration cap");
  app.add_option("--sweep", sweep, "Coupling sweep MIN:MAX:STEPS");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out, "Output directory");
  app.add_option("--threads", threads, "Sweep workers");
  app.add_option("--modes", modes, "Modes written to the tables");
  app.add_flag("--validate", validate, "Fail (exit 5) when canonical or symmetry checks are violated");
  app.add_option("--write-config", write_config, "Write the effective configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (config_path.empty() && preset_name.empty()) throw InvalidArgument("one of --config or --preset is required");
    RunConfig cfg = config_path.empty() ? preset(preset_name) : load_config(config_path);
    if (model) cfg.solver.model = parse_model(*model);
    if (scheme) cfg.solver.scheme = parse_scheme(*scheme);
    if (gamma) cfg.process.coupling = *gamma;
    if (target_metric) {
      TargetConfig t;
      t.metric = parse_target_metric(*target_metric);
      t.value = *target_value;
      if (branch) t.branch = parse_branch(*branch);
      cfg.target = t;
    }
    if (grid_n) cfg.grid.n = *grid_n;
    if (nu_min) {
      cfg.grid.nu_min = *nu_min;
      cfg.grid.nu_max = *nu_max;
    }
    if (z_steps) cfg.z_steps = *z_steps;
    if (tol) cfg.solver.tol = *tol;
    if (max_iter) cfg.solver.max_iter = *max_iter;
    if (sweep) cfg.sweep = parse_sweep(*sweep);
    if (format) cfg.output.format = parse_output_format(*format);
    if (out) cfg.output.path = *out;
    if (threads) cfg.threads = *threads;
    if (modes) cfg.output.modes = *modes;
    if (validate) cfg.validate = true;
    cfg.check();

    if (!write_config.empty()) {
      try {
        save_config(cfg, write_config);
      } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
      }
      return kExitOk;
    }
    return run(cfg, std::cerr);
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
