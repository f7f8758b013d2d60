#pragma once

#include <cstddef>
#include <vector>

#include "highgain/process.hpp"
#include "highgain/types.hpp"

namespace highgain {

/// Paired broadband modes of a Bogoliubov transformation.
///
/// Families follow the mode-operator definitions A_k = int psi_k(nu) a(nu) dnu:
///   in_a   psi_k     input modes of field a
///   in_b   phi_k     input modes of field c (FC) / b (PDC)
///   out_a  varphi_k  output modes of field a
///   out_b  xi_k      output modes of field c / b
/// Columns are modes, sampled on `grid`, normalised so dnu * sum |m|^2 = 1.
struct ModeSpectrum {
  ProcessKind kind = ProcessKind::FC;
  FrequencyGrid grid{2, -1.0, 1.0};
  std::vector<double> r;  ///< descending, >= 0
  ModeMatrix in_a;
  ModeMatrix in_b;
  ModeMatrix out_a;
  ModeMatrix out_b;

  std::size_t size() const noexcept { return r.size(); }
};

/// Number of leading modes above the noise floor r_k >= 1e-12 r_1
/// (all modes when r_1 == 0).
std::size_t significant_mode_count(const std::vector<double>& r);

/// dnu-weighted inner product <a, b> = dnu * sum conj(a_i) b_i.
cd mode_overlap(const FrequencyGrid& grid, const CVector& a, const CVector& b);

/// Largest |dnu <m_j, m_k> - delta_jk| over the first `count` columns.
double orthonormality_error(const FrequencyGrid& grid, const ModeMatrix& modes, std::size_t count);

/// RMS width of |m(nu)|^2 about its centroid.
double rms_width(const FrequencyGrid& grid, const CVector& mode);

/// Index of the largest-magnitude component (first one on ties).
Eigen::Index peak_index(const CVector& v);

/// Phase that makes the largest-magnitude component real and positive.
cd peak_phase(const CVector& v);

/// Per-mode figures of merit: sin^2 r (FC conversion efficiency) or
/// sinh^2 r (PDC gain), EPR squeezing in dB and the mean photon number.
struct MetricsReport {
  ProcessKind kind = ProcessKind::FC;
  std::vector<double> r;
  std::vector<double> efficiency_or_gain;
  std::vector<double> squeezing_db;  ///< PDC only
  double mean_photons = 0.0;         ///< PDC: sum_k sinh^2 r_k
  double first_mode_efficiency = 0.0;
};

MetricsReport derived_metrics(const ModeSpectrum& modes);
MetricsReport derived_metrics(ProcessKind kind, const std::vector<double>& r);

/// -10 log10(exp(-2 r)) = 20 r / ln 10.
double squeezing_db(double r);

}  // namespace highgain
