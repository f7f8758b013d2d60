#include "highgain/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace highgain {

std::size_t significant_mode_count(const std::vector<double>& r) {
  if (r.empty() || r.front() == 0.0) return r.size();
  const double floor = 1e-12 * r.front();
  std::size_t count = 0;
  while (count < r.size() && r[count] >= floor) ++count;
  return count;
}

cd mode_overlap(const FrequencyGrid& grid, const CVector& a, const CVector& b) {
  return grid.weight() * a.dot(b);
}

double orthonormality_error(const FrequencyGrid& grid, const ModeMatrix& modes, std::size_t count) {
  count = std::min<std::size_t>(count, static_cast<std::size_t>(modes.cols()));
  if (count == 0) return 0.0;
  const auto block = modes.leftCols(static_cast<Eigen::Index>(count));
  const Eigen::MatrixXcd gram = grid.weight() * (block.adjoint() * block);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  return (gram - id).cwiseAbs().maxCoeff();
}

double rms_width(const FrequencyGrid& grid, const CVector& mode) {
  double norm = 0.0;
  double mean = 0.0;
  for (Eigen::Index i = 0; i < mode.size(); ++i) {
    const double w = std::norm(mode(i));
    norm += w;
    mean += w * grid[static_cast<std::size_t>(i)];
  }
  if (norm == 0.0) return 0.0;
  mean /= norm;
  double var = 0.0;
  for (Eigen::Index i = 0; i < mode.size(); ++i) {
    const double d = grid[static_cast<std::size_t>(i)] - mean;
    var += std::norm(mode(i)) * d * d;
  }
  return std::sqrt(var / norm);
}

Eigen::Index peak_index(const CVector& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

cd peak_phase(const CVector& v) {
  if (v.size() == 0) return {1.0, 0.0};
  const cd peak = v(peak_index(v));
  const double mag = std::abs(peak);
  if (mag == 0.0) return {1.0, 0.0};
  return std::conj(peak) / mag;
}

double squeezing_db(double r) { return 20.0 * r / std::numbers::ln10; }

MetricsReport derived_metrics(ProcessKind kind, const std::vector<double>& r) {
  MetricsReport out;
  out.kind = kind;
  out.r = r;
  out.efficiency_or_gain.reserve(r.size());
  for (double rk : r) {
    if (kind == ProcessKind::FC) {
      const double s = std::sin(rk);
      out.efficiency_or_gain.push_back(s * s);
    } else {
      const double s = std::sinh(rk);
      out.efficiency_or_gain.push_back(s * s);
      out.squeezing_db.push_back(squeezing_db(rk));
      out.mean_photons += s * s;
    }
  }
  if (kind == ProcessKind::FC && !r.empty()) out.first_mode_efficiency = out.efficiency_or_gain.front();
  return out;
}

MetricsReport derived_metrics(const ModeSpectrum& modes) { return derived_metrics(modes.kind, modes.r); }

}  // namespace highgain
