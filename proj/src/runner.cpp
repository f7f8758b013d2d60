#include "highgain/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "highgain/analytic.hpp"
#include "highgain/bloch_messiah.hpp"
#include "highgain/errors.hpp"
#include "highgain/validation.hpp"

namespace highgain {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

// JSON has no NaN; emit null instead.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double first_like(ProcessKind kind, double r) {
  const double s = kind == ProcessKind::FC ? std::sin(r) : std::sinh(r);
  return s * s;
}

double total_like(ProcessKind kind, const std::vector<double>& r) {
  double t = 0.0;
  for (double rk : r) t += first_like(kind, rk);
  return t;
}

struct AnalyticRun {
  ModeSpectrum modes;
  double orthonormality = 0.0;
  double reconstruction = 0.0;  // max entry error of the Schmidt expansion / max |J|
};

struct RigorousRun {
  TransferMatrices tm;
  ModeSpectrum modes;
  CanonicalErrors canonical;
  SymmetryReport symmetry;
  double orthonormality = 0.0;
  double seconds = 0.0;
};

AnalyticRun run_analytic(const ProcessSpec& spec, const FrequencyGrid& grid) {
  AnalyticRun out;
  const JsaKernel jsa = build_jsa(spec, grid);
  out.modes = schmidt_decompose(jsa, spec.kind);
  const std::size_t n = grid.size();
  out.orthonormality = std::max(orthonormality_error(grid, out.modes.in_a, n), orthonormality_error(grid, out.modes.in_b, n));
  Eigen::MatrixXcd expansion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    expansion += (out.modes.r[k] * grid.weight()) * out.modes.in_a.col(kk) * out.modes.in_b.col(kk).adjoint();
  }
  const Eigen::MatrixXcd ij = cd(0.0, 1.0) * Eigen::MatrixXcd(jsa.values);
  const double scale = jsa.values.cwiseAbs().maxCoeff();
  const double err = (expansion - ij).cwiseAbs().maxCoeff();
  out.reconstruction = scale > 0.0 ? err / scale : err;
  return out;
}

RigorousRun run_rigorous(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                         const SolverOptions& options) {
  RigorousRun out;
  const auto start = Clock::now();
  out.tm = solve_rigorous(spec, grid, zgrid, options);
  out.modes = bloch_messiah(out.tm);
  out.seconds = seconds_since(start);
  out.canonical = canonical_error(out.tm);
  out.symmetry = symmetry_check(out.tm, out.modes);
  const std::size_t n = grid.size();
  out.orthonormality = std::max({orthonormality_error(grid, out.modes.in_a, n),
                                 orthonormality_error(grid, out.modes.in_b, n),
                                 orthonormality_error(grid, out.modes.out_a, n),
                                 orthonormality_error(grid, out.modes.out_b, n)});
  return out;
}

std::size_t reported_modes(const RunConfig& cfg, const ModeSpectrum& modes) {
  return std::min(cfg.output.modes, significant_mode_count(modes.r));
}

struct Family {
  const char* name;
  const ModeMatrix* values;
};

std::vector<Family> families(const ModeSpectrum& m) {
  return {{"psi", &m.in_a}, {"phi", &m.in_b}, {"varphi", &m.out_a}, {"xi", &m.out_b}};
}

void write_modes_csv(const fs::path& dir, const RunConfig& cfg,
                     const std::vector<std::pair<const char*, const ModeSpectrum*>>& runs) {
  const bool pdc = cfg.process.kind == ProcessKind::PDC;
  std::string text = pdc ? "mode_index,r,efficiency_or_gain,squeezing_db,model\n" : "mode_index,r,efficiency_or_gain,model\n";
  for (const auto& [name, modes] : runs) {
    const std::size_t count = reported_modes(cfg, *modes);
    for (std::size_t k = 0; k < count; ++k) {
      const double r = modes->r[k];
      text += std::to_string(k + 1) + "," + format_number(r) + "," + format_number(first_like(cfg.process.kind, r)) + ",";
      if (pdc) text += format_number(squeezing_db(r)) + ",";
      text += std::string(name) + "\n";
    }
  }
  write_file(dir / "modes.csv", text);
}

void write_modes_json(const fs::path& dir, const RunConfig& cfg,
                      const std::vector<std::pair<const char*, const ModeSpectrum*>>& runs) {
  const bool pdc = cfg.process.kind == ProcessKind::PDC;
  json rows = json::array();
  json shapes = json::object();
  for (const auto& [name, modes] : runs) {
    const std::size_t count = reported_modes(cfg, *modes);
    json model_shapes = json::object();
    for (std::size_t k = 0; k < count; ++k) {
      const double r = modes->r[k];
      json row{{"mode_index", k + 1}, {"r", r}, {"efficiency_or_gain", first_like(cfg.process.kind, r)}, {"model", name}};
      if (pdc) row["squeezing_db"] = squeezing_db(r);
      rows.push_back(row);
    }
    for (const Family& fam : families(*modes)) {
      json list = json::array();
      for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> re;
        std::vector<double> im;
        const auto col = fam.values->col(static_cast<Eigen::Index>(k));
        for (Eigen::Index i = 0; i < col.size(); ++i) {
          re.push_back(col(i).real());
          im.push_back(col(i).imag());
        }
        list.push_back(json{{"mode_index", k + 1}, {"re", re}, {"im", im}});
      }
      model_shapes[fam.name] = list;
    }
    model_shapes["nu"] = runs.front().second->grid.points();
    shapes[name] = model_shapes;
  }
  write_file(dir / "modes.json", json{{"modes", rows}}.dump(2) + "\n");
  write_file(dir / "shapes.json", shapes.dump() + "\n");
}

void write_shapes_csv(const fs::path& dir, const RunConfig& cfg,
                      const std::vector<std::pair<const char*, const ModeSpectrum*>>& runs) {
  const fs::path shape_dir = dir / "shapes";
  std::error_code ec;
  fs::create_directories(shape_dir, ec);
  if (ec) throw IoError("cannot create " + shape_dir.string() + ": " + ec.message());
  for (const auto& [name, modes] : runs) {
    const std::size_t count = reported_modes(cfg, *modes);
    for (const Family& fam : families(*modes)) {
      for (std::size_t k = 0; k < count; ++k) {
        std::string text = "nu,re,im\n";
        const auto col = fam.values->col(static_cast<Eigen::Index>(k));
        for (Eigen::Index i = 0; i < col.size(); ++i) {
          text += format_number(modes->grid[static_cast<std::size_t>(i)]) + "," + format_number(col(i).real()) + "," +
                  format_number(col(i).imag()) + "\n";
        }
        write_file(shape_dir / (std::string(name) + "_" + fam.name + "_" + std::to_string(k + 1) + ".csv"), text);
      }
    }
  }
}

void write_sweep(const fs::path& dir, const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  if (cfg.output.format == OutputFormat::Json) {
    json list = json::array();
    for (const SweepRow& r : rows) {
      list.push_back(json{{"gamma", r.gamma},
                          {"analytic_r1", number(r.analytic_r1)},
                          {"rigorous_r1", number(r.rigorous_r1)},
                          {"analytic_first_mode", number(r.analytic_first)},
                          {"rigorous_first_mode", number(r.rigorous_first)},
                          {"analytic_total", number(r.analytic_total)},
                          {"rigorous_total", number(r.rigorous_total)},
                          {"canonical_error", number(r.canonical_error)},
                          {"unitarity_deviation", number(r.unitarity_deviation)},
                          {"iterations", r.iterations},
                          {"residual", number(r.residual)}});
    }
    write_file(dir / "sweep.json", json{{"sweep", list}}.dump(2) + "\n");
    return;
  }
  std::string text =
      "gamma,analytic_r1,rigorous_r1,analytic_first_mode,rigorous_first_mode,analytic_total,rigorous_total,"
      "canonical_error,unitarity_deviation,iterations,residual\n";
  for (const SweepRow& r : rows) {
    text += format_number(r.gamma) + "," + format_number(r.analytic_r1) + "," + format_number(r.rigorous_r1) + "," +
            format_number(r.analytic_first) + "," + format_number(r.rigorous_first) + "," +
            format_number(r.analytic_total) + "," + format_number(r.rigorous_total) + "," +
            format_number(r.canonical_error) + "," + format_number(r.unitarity_deviation) + "," +
            std::to_string(r.iterations) + "," + format_number(r.residual) + "\n";
  }
  write_file(dir / "sweep.csv", text);
}

json canonical_json(const CanonicalErrors& e) {
  return json{{"identity_a", e.identity_a},
              {"identity_x", e.identity_x},
              {"cross", e.cross},
              {"inverse_identity_a", e.inverse_identity_a},
              {"inverse_identity_x", e.inverse_identity_x},
              {"inverse_cross", e.inverse_cross},
              {"max", e.max()}};
}

json process_json(const ProcessSpec& p) {
  return json{{"kind", std::string(to_string(p.kind))}, {"sigma", p.sigma},       {"coupling", p.coupling},
              {"kp_slope", p.kp_slope},                 {"k1_slope", p.k1_slope}, {"k2_slope", p.k2_slope},
              {"length", p.length}};
}

json grid_json(const FrequencyGrid& grid, const ZGrid& zgrid) {
  return json{{"n", grid.size()},   {"nu_min", grid.nu_min()}, {"nu_max", grid.nu_max()},
              {"weight", grid.weight()}, {"m", zgrid.size()},  {"z_step", zgrid.step()}};
}

void fail_if(std::vector<std::string>& failures, bool bad, const std::string& what) {
  if (bad) failures.push_back(what);
}

std::string describe(const char* name, double value, double limit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %.3e exceeds %.3e", name, value, limit);
  return buf;
}

}  // namespace

ValidationLimits ValidationLimits::for_kind(ProcessKind kind) {
  ValidationLimits v;
  if (kind == ProcessKind::FC) {
    v.canonical = 2.7e-4;
    v.unitarity = 1e-4;
  } else {
    v.canonical = 1.4e-5;
    v.unitarity = 2e-4;
  }
  return v;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const std::vector<double>& gammas) {
  const FrequencyGrid grid = config.frequency_grid();
  const ZGrid zgrid = config.z_grid();
  const SolverOptions options = config.solver_options();
  const bool with_analytic = config.solver.model != Model::Rigorous;
  const bool with_rigorous = config.solver.model != Model::Analytic;
  const ProcessKind kind = config.process.kind;

  std::vector<SweepRow> rows(gammas.size());
  std::vector<std::exception_ptr> errors(gammas.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < gammas.size(); i = next++) {
      try {
        const ProcessSpec spec = config.process.with_coupling(gammas[i]);
        SweepRow row;
        row.gamma = gammas[i];
        row.analytic_r1 = row.analytic_first = row.analytic_total = kNaN;
        row.rigorous_r1 = row.rigorous_first = row.rigorous_total = kNaN;
        row.canonical_error = row.unitarity_deviation = row.residual = kNaN;
        if (with_analytic) {
          const ModeSpectrum an = analytic_solve(spec, grid);
          row.analytic_r1 = an.r.front();
          row.analytic_first = first_like(kind, an.r.front());
          row.analytic_total = total_like(kind, an.r);
        }
        if (with_rigorous) {
          const RigorousRun rig = run_rigorous(spec, grid, zgrid, options);
          row.rigorous_r1 = rig.modes.r.front();
          row.rigorous_first = first_like(kind, rig.modes.r.front());
          row.rigorous_total = total_like(kind, rig.modes.r);
          row.canonical_error = rig.canonical.max();
          row.unitarity_deviation = rig.symmetry.unitarity_deviation;
          row.iterations = rig.tm.iterations_used;
          row.residual = rig.tm.residual;
        }
        rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, gammas.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

int run(const RunConfig& config, std::ostream& log) {
  const auto start = Clock::now();
  RunConfig cfg = config;
  json diag;
  std::vector<std::string> failures;
  try {
    cfg.check();
    const FrequencyGrid grid = cfg.frequency_grid();
    const ZGrid zgrid = cfg.z_grid();
    if (cfg.target) {
      const double gamma = find_coupling(cfg.process, grid, cfg.target->value, cfg.target->metric, cfg.target->branch);
      cfg.process.coupling = gamma;
      log << "find_coupling: " << to_string(cfg.target->metric) << " = " << cfg.target->value << " ("
          << to_string(cfg.target->branch) << ") at gamma = " << format_number(gamma) << "\n";
      diag["target"] = json{{"metric", std::string(to_string(cfg.target->metric))},
                            {"value", cfg.target->value},
                            {"branch", std::string(to_string(cfg.target->branch))},
                            {"gamma", gamma}};
    }
    const fs::path dir(cfg.output.path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    diag["process"] = process_json(cfg.process);
    diag["grid"] = grid_json(grid, zgrid);
    diag["model"] = std::string(to_string(cfg.solver.model));
    diag["scheme"] = std::string(to_string(cfg.solver.scheme));
    const ValidationLimits limits = ValidationLimits::for_kind(cfg.process.kind);

    if (cfg.sweep) {
      const std::vector<double> gammas = cfg.sweep->values();
      log << "sweep: " << gammas.size() << " couplings, " << cfg.threads << " thread(s)\n";
      const std::vector<SweepRow> rows = run_sweep(cfg, gammas);
      write_sweep(dir, cfg, rows);
      double worst_canonical = 0.0;
      double worst_unitarity = 0.0;
      int max_iterations = 0;
      for (const SweepRow& r : rows) {
        if (!std::isnan(r.canonical_error)) worst_canonical = std::max(worst_canonical, r.canonical_error);
        if (!std::isnan(r.unitarity_deviation)) worst_unitarity = std::max(worst_unitarity, r.unitarity_deviation);
        max_iterations = std::max(max_iterations, r.iterations);
      }
      diag["sweep"] = json{{"points", rows.size()},
                           {"max_canonical_error", worst_canonical},
                           {"max_unitarity_deviation", worst_unitarity},
                           {"max_iterations", max_iterations}};
      if (cfg.validate) {
        fail_if(failures, worst_canonical > limits.canonical, describe("canonical error", worst_canonical, limits.canonical));
        fail_if(failures, worst_unitarity > limits.unitarity,
                describe("unitarity deviation", worst_unitarity, limits.unitarity));
      }
    } else {
      std::vector<std::pair<const char*, const ModeSpectrum*>> runs;
      AnalyticRun an;
      RigorousRun rig;
      if (cfg.solver.model != Model::Rigorous) {
        an = run_analytic(cfg.process, grid);
        runs.emplace_back("analytic", &an.modes);
        const MetricsReport m = derived_metrics(an.modes);
        const double r1 = an.modes.r.front();
        double s2 = 0.0;
        double s4 = 0.0;
        for (double r : an.modes.r) {
          s2 += r * r;
          s4 += r * r * r * r;
        }
        diag["analytic"] = json{{"r1", r1},
                                {"first_mode", first_like(cfg.process.kind, r1)},
                                {"total", total_like(cfg.process.kind, an.modes.r)},
                                {"schmidt_number", s4 > 0.0 ? s2 * s2 / s4 : 1.0},
                                {"orthonormality_error", an.orthonormality},
                                {"reconstruction_error", an.reconstruction}};
        if (cfg.process.kind == ProcessKind::PDC) {
          diag["analytic"]["mean_photons"] = m.mean_photons;
          diag["analytic"]["squeezing_db"] = squeezing_db(r1);
        }
        log << "analytic: r1 = " << format_number(r1) << "\n";
        if (cfg.validate) {
          fail_if(failures, an.orthonormality > limits.orthonormality,
                  describe("analytic orthonormality", an.orthonormality, limits.orthonormality));
          fail_if(failures, an.reconstruction > 1e-8, describe("analytic reconstruction", an.reconstruction, 1e-8));
        }
      }
      if (cfg.solver.model != Model::Analytic) {
        rig = run_rigorous(cfg.process, grid, zgrid, cfg.solver_options());
        runs.emplace_back("rigorous", &rig.modes);
        const double r1 = rig.modes.r.front();
        json history = json::array();
        for (double h : rig.tm.residual_history) history.push_back(h);
        diag["rigorous"] = json{{"r1", r1},
                                {"first_mode", first_like(cfg.process.kind, r1)},
                                {"total", total_like(cfg.process.kind, rig.modes.r)},
                                {"iterations", rig.tm.iterations_used},
                                {"residual", rig.tm.residual},
                                {"residual_history", history},
                                {"monotone_after_two", rig.tm.monotone_after_two},
                                {"canonical_errors", canonical_json(rig.canonical)},
                                {"unitarity_deviation", rig.symmetry.unitarity_deviation},
                                {"reconstruction",
                                 json{{"Ua", rig.symmetry.reconstruction_ua},
                                      {"Ux", rig.symmetry.reconstruction_ux},
                                      {"Va", rig.symmetry.reconstruction_va},
                                      {"Vx", rig.symmetry.reconstruction_vx}}},
                                {"orthonormality_error", rig.orthonormality},
                                {"wall_seconds", rig.seconds}};
        if (cfg.process.kind == ProcessKind::PDC) diag["rigorous"]["squeezing_db"] = squeezing_db(r1);
        if (!rig.tm.monotone_after_two) log << "note: Picard residual was not monotone after the second sweep\n";
        log << "rigorous: r1 = " << format_number(r1) << ", canonical error " << format_number(rig.canonical.max())
            << ", " << rig.tm.iterations_used << " iteration(s)\n";
        if (cfg.validate) {
          fail_if(failures, rig.canonical.max() > limits.canonical,
                  describe("canonical error", rig.canonical.max(), limits.canonical));
          fail_if(failures, rig.symmetry.unitarity_deviation > limits.unitarity,
                  describe("unitarity deviation", rig.symmetry.unitarity_deviation, limits.unitarity));
          fail_if(failures, rig.symmetry.max_reconstruction() > limits.reconstruction,
                  describe("reconstruction error", rig.symmetry.max_reconstruction(), limits.reconstruction));
          fail_if(failures, rig.orthonormality > limits.orthonormality,
                  describe("mode orthonormality", rig.orthonormality, limits.orthonormality));
        }
      }
      if (cfg.output.format == OutputFormat::Csv) {
        write_modes_csv(dir, cfg, runs);
        write_shapes_csv(dir, cfg, runs);
      } else {
        write_modes_json(dir, cfg, runs);
      }
    }
    diag["validation"] = json{{"enabled", cfg.validate}, {"passed", failures.empty()}, {"failures", failures}};
    diag["wall_seconds"] = seconds_since(start);
    write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
    for (const std::string& f : failures) log << "validation failure: " << f << "\n";
    return failures.empty() ? kExitOk : kExitValidation;
  } catch (const InvalidArgument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TargetUnreachable& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergence& e) {
    log << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const IoError& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const PairingAmbiguity& e) {
    log << "decomposition error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CanonicalViolation& e) {
    log << "decomposition error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace highgain
