#include "highgain/process.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <string>

#include "highgain/errors.hpp"

namespace highgain {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw InvalidArgument(std::string("process.") + field + " must be finite");
  }
}

// Sign s of the z-kernel phase exp(s i dk z).
double kernel_phase_sign(ProcessKind kind) { return kind == ProcessKind::FC ? -1.0 : 1.0; }

}  // namespace

std::string_view to_string(ProcessKind kind) { return kind == ProcessKind::FC ? "FC" : "PDC"; }

ProcessKind parse_process_kind(std::string_view text) {
  if (text == "FC" || text == "fc") return ProcessKind::FC;
  if (text == "PDC" || text == "pdc") return ProcessKind::PDC;
  throw InvalidArgument("unknown process kind '" + std::string(text) + "' (expected FC or PDC)");
}

void ProcessSpec::validate() const {
  require_finite(sigma, "sigma");
  require_finite(coupling, "coupling");
  require_finite(kp_slope, "kp_slope");
  require_finite(k1_slope, "k1_slope");
  require_finite(k2_slope, "k2_slope");
  require_finite(length, "length");
  if (sigma <= 0.0) throw InvalidArgument("process.sigma must be > 0");
  if (length <= 0.0) throw InvalidArgument("process.length must be > 0");
  if (coupling < 0.0) throw InvalidArgument("process.coupling must be >= 0");
}

ProcessSpec ProcessSpec::with_coupling(double gamma) const {
  ProcessSpec out = *this;
  out.coupling = gamma;
  return out;
}

PhaseRates phase_rates(const ProcessSpec& spec) {
  // FC:  dk = kp (nu' - nu) - kc nu' + ka nu
  // PDC: dk = kp (nu + nu') - ka nu - kb nu'
  if (spec.kind == ProcessKind::FC) {
    return {spec.k1_slope - spec.kp_slope, spec.kp_slope - spec.k2_slope};
  }
  return {spec.kp_slope - spec.k1_slope, spec.kp_slope - spec.k2_slope};
}

FrequencyGrid::FrequencyGrid(std::size_t n, double nu_min, double nu_max) : nu_min_(nu_min), nu_max_(nu_max) {
  if (n < 2) throw InvalidArgument("grid.n must be >= 2");
  if (!std::isfinite(nu_min) || !std::isfinite(nu_max)) throw InvalidArgument("grid bounds must be finite");
  if (!(nu_max > nu_min)) throw InvalidArgument("grid.nu_max must exceed grid.nu_min");
  weight_ = (nu_max - nu_min) / static_cast<double>(n - 1);
  points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) points_[i] = nu_min + weight_ * static_cast<double>(i);
  points_.back() = nu_max;
}

FrequencyGrid FrequencyGrid::centered(std::size_t n, double half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("grid half-width must be > 0");
  return FrequencyGrid(n, -half_width, half_width);
}

ZGrid::ZGrid(std::size_t m, double length) : length_(length) {
  if (m < 2) throw InvalidArgument("zgrid.m must be >= 2");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("zgrid length must be > 0");
  step_ = length / static_cast<double>(m - 1);
  points_.resize(m);
  for (std::size_t l = 0; l < m; ++l) points_[l] = -0.5 * length + step_ * static_cast<double>(l);
  points_.front() = -0.5 * length;
  points_.back() = 0.5 * length;
}

std::vector<double> ZGrid::trapezoid_weights() const {
  std::vector<double> w(points_.size(), step_);
  w.front() = 0.5 * step_;
  w.back() = 0.5 * step_;
  return w;
}

double effective_bandwidth(const ProcessSpec& spec) {
  const double walkoff = std::abs(spec.k1_slope - spec.k2_slope) * spec.length;
  if (walkoff == 0.0) return spec.sigma;
  return std::max(spec.sigma, 2.0 * std::numbers::pi / walkoff);
}

double default_half_width(const ProcessSpec& spec) { return 5.0 * effective_bandwidth(spec); }

FrequencyGrid default_grid(const ProcessSpec& spec, std::size_t n) {
  spec.validate();
  return FrequencyGrid::centered(n, default_half_width(spec));
}

cd pump_amplitude(const ProcessSpec& spec, double nu, double nu_prime) {
  const double arg = spec.kind == ProcessKind::FC ? nu - nu_prime : nu + nu_prime;
  return {std::exp(-arg * arg / (2.0 * spec.sigma * spec.sigma)), 0.0};
}

double phase_mismatch(const ProcessSpec& spec, double nu, double nu_prime) {
  const PhaseRates rates = phase_rates(spec);
  return rates.row * nu + rates.col * nu_prime;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

JsaKernel build_jsa(const ProcessSpec& spec, const FrequencyGrid& grid) {
  spec.validate();
  const std::size_t n = grid.size();
  CMatrix values(n, n);
  const double scale = spec.coupling * grid.weight();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dk = phase_mismatch(spec, grid[i], grid[j]);
      values(i, j) = scale * pump_amplitude(spec, grid[i], grid[j]) * sinc(0.5 * dk * spec.length);
    }
  }
  return {grid, std::move(values)};
}

PumpOperator::PumpOperator(const RMatrix& p, PumpFactorization mode) {
  const Eigen::Index n = p.rows();
  if (mode == PumpFactorization::Auto && n >= 8) {
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(p);
    const RVector& lambda = eig.eigenvalues();
    const double cutoff = 1e-15 * lambda.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(lambda(k)) > cutoff) keep.push_back(k);
    }
    const auto r = static_cast<Eigen::Index>(keep.size());
    if (4 * r < n) {
      factored_ = true;
      basis_.resize(n, r);
      weights_.resize(r);
      for (Eigen::Index k = 0; k < r; ++k) {
        basis_.col(k) = eig.eigenvectors().col(keep[static_cast<std::size_t>(k)]);
        weights_(k) = lambda(keep[static_cast<std::size_t>(k)]);
      }
      return;
    }
  }
  dense_ = p;
}

void PumpOperator::apply(const CMatrix& x, CMatrix& out) const {
  if (!factored_) {
    real_times_complex(dense_, x, out);
    return;
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  out.resize(n, k);
  Eigen::Map<const RMatrix> xr(reinterpret_cast<const double*>(x.data()), n, 2 * k);
  Eigen::Map<RMatrix> outr(reinterpret_cast<double*>(out.data()), n, 2 * k);
  RMatrix coeff = basis_.transpose() * xr;
  coeff = weights_.asDiagonal() * coeff;
  if (identity_ != 0.0) {
    outr = identity_ * xr;
    outr.noalias() += basis_ * coeff;
  } else {
    outr.noalias() = basis_ * coeff;
  }
}

PumpOperator PumpOperator::shifted_inverse_square(double beta) const {
  PumpOperator out;
  if (!factored_) {
    const Eigen::Index n = dense_.rows();
    const RMatrix shifted = RMatrix::Identity(n, n) - beta * (dense_ * dense_);
    Eigen::FullPivLU<RMatrix> lu(shifted);
    if (!lu.isInvertible()) throw InvalidArgument("shifted pump matrix is singular");
    out.dense_ = lu.inverse();
    return out;
  }
  if (identity_ != 0.0) throw InvalidArgument("shifted_inverse_square needs a pure low-rank operator");
  // (1 - beta W L^2 W^T)^{-1} = 1 + W diag(beta l^2 / (1 - beta l^2)) W^T
  out.factored_ = true;
  out.identity_ = 1.0;
  out.basis_ = basis_;
  out.weights_.resize(weights_.size());
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    const double t = beta * weights_(k) * weights_(k);
    if (!(std::abs(1.0 - t) > 1e-14)) throw InvalidArgument("shifted pump matrix is singular");
    out.weights_(k) = t / (1.0 - t);
  }
  return out;
}

RMatrix PumpOperator::dense() const {
  if (!factored_) return dense_;
  RMatrix out = basis_ * weights_.asDiagonal() * basis_.transpose();
  out.diagonal().array() += identity_;
  return out;
}

ZKernel::ZKernel(const ProcessSpec& spec, FrequencyGrid grid, ZGrid zgrid, PumpFactorization factorization)
    : kind_(spec.kind), grid_(std::move(grid)), zgrid_(std::move(zgrid)) {
  spec.validate();
  if (std::abs(zgrid_.length() - spec.length) > 1e-12 * spec.length) {
    throw InvalidArgument("zgrid length does not match process.length");
  }
  const std::size_t n = grid_.size();
  prefactor_ = cd(0.0, -spec.coupling / spec.length);
  pump_.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pump_(i, j) = pump_amplitude(spec, grid_[i], grid_[j]).real() * grid_.weight();
    }
  }
  pump_op_ = PumpOperator(pump_, factorization);
  const PhaseRates rates = phase_rates(spec);
  const double s = kernel_phase_sign(spec.kind);
  row_rate_ = s * rates.row;
  col_rate_ = s * rates.col;
}

CVector ZKernel::row_phase(std::size_t l) const {
  const double z = zgrid_[l];
  CVector out(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out(i) = std::polar(1.0, row_rate_ * grid_[i] * z);
  return out;
}

CVector ZKernel::col_phase(std::size_t l) const {
  const double z = zgrid_[l];
  CVector out(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) out(j) = std::polar(1.0, col_rate_ * grid_[j] * z);
  return out;
}

cd ZKernel::value(std::size_t i, std::size_t j, std::size_t l) const {
  const double z = zgrid_[l];
  return prefactor_ * pump_(i, j) * std::polar(1.0, (row_rate_ * grid_[i] + col_rate_ * grid_[j]) * z);
}

CMatrix ZKernel::slice(std::size_t l) const {
  const CVector rp = row_phase(l);
  const CVector cp = col_phase(l);
  CMatrix out = prefactor_ * (rp.asDiagonal() * pump_.cast<cd>() * cp.asDiagonal());
  return out;
}

cd ZKernel::form_coefficient(Form form) const {
  switch (form) {
    case Form::Direct:
    case Form::Transpose:
      return prefactor_;
    case Form::Adjoint:
    case Form::Conjugate:
      return std::conj(prefactor_);
  }
  return prefactor_;
}

// With K = c R P C (R, C diagonal phases, P real symmetric):
//   K     = c      R  P C
//   K^T   = c      C  P R
//   K^dag = conj c C* P R*
//   K*    = conj c R* P C*
CVector ZKernel::input_phase(Form form, std::size_t l) const {
  switch (form) {
    case Form::Direct:
      return col_phase(l);
    case Form::Transpose:
      return row_phase(l);
    case Form::Adjoint:
      return row_phase(l).conjugate();
    case Form::Conjugate:
      return col_phase(l).conjugate();
  }
  return col_phase(l);
}

CVector ZKernel::output_phase(Form form, std::size_t l) const {
  switch (form) {
    case Form::Direct:
      return row_phase(l);
    case Form::Transpose:
      return col_phase(l);
    case Form::Adjoint:
      return col_phase(l).conjugate();
    case Form::Conjugate:
      return row_phase(l).conjugate();
  }
  return row_phase(l);
}

void ZKernel::apply(Form form, std::size_t l, const CMatrix& x, CMatrix& out) const {
  const CVector in_phase = input_phase(form, l);
  const CVector out_phase = output_phase(form, l);
  const CMatrix scaled = in_phase.asDiagonal() * x;
  pump_op_.apply(scaled, out);
  out = (form_coefficient(form) * out_phase).asDiagonal() * out;
}

ZKernel build_z_kernel(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                       PumpFactorization factorization) {
  return ZKernel(spec, grid, zgrid, factorization);
}

void real_times_complex(const RMatrix& p, const CMatrix& x, CMatrix& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  out.resize(p.rows(), k);
  using RealView = Eigen::Map<RMatrix>;
  using ConstRealView = Eigen::Map<const RMatrix>;
  ConstRealView xr(reinterpret_cast<const double*>(x.data()), n, 2 * k);
  RealView outr(reinterpret_cast<double*>(out.data()), p.rows(), 2 * k);
  outr.noalias() = p * xr;
}

}  // namespace highgain
