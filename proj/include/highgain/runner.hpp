#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "highgain/config.hpp"

namespace highgain {

/// Process exit codes of a batch run.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,          ///< invalid config or unreachable target
  kExitNonConvergence = 3,  ///< Picard residual above tol after max_iter
  kExitIo = 4,              ///< output could not be written
  kExitValidation = 5,      ///< --validate thresholds violated, or the decomposition failed
};

/// Thresholds applied by --validate.
struct ValidationLimits {
  double canonical = 0.0;    ///< 2.7e-4 (FC) / 1.4e-5 (PDC)
  double unitarity = 0.0;    ///< 1e-4 (FC) / 2e-4 (PDC)
  double reconstruction = 1e-6;
  double orthonormality = 1e-8;

  static ValidationLimits for_kind(ProcessKind kind);
};

/// One row of the sweep table. Fields of a model that was not run stay NaN.
struct SweepRow {
  double gamma = 0.0;
  double analytic_r1 = 0.0;
  double rigorous_r1 = 0.0;
  double analytic_first = 0.0;  ///< sin^2 r_1 (FC) or sinh^2 r_1 (PDC)
  double rigorous_first = 0.0;
  double analytic_total = 0.0;  ///< sum sin^2 r_k (FC) or <n> (PDC)
  double rigorous_total = 0.0;
  double canonical_error = 0.0;
  double unitarity_deviation = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Sweep over couplings with `threads` workers. Rows come back in input order
/// and do not depend on the thread count.
std::vector<SweepRow> run_sweep(const RunConfig& config, const std::vector<double>& gammas);

/// Execute a configuration and write its outputs under config.output.path:
///   modes.csv | modes.json     mode_index, r, efficiency_or_gain, [squeezing_db,] model
///   shapes/<model>_<family>_<k>.csv   nu, re, im   (csv format)
///   shapes.json                       (json format)
///   sweep.csv | sweep.json     one row per coupling (sweep runs only)
///   diagnostics.json           errors, iterations, residuals, wall time
/// Progress and a summary go to `log`. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& log);

/// Fixed 17-significant-digit scientific formatting used in every CSV.
std::string format_number(double value);

}  // namespace highgain
