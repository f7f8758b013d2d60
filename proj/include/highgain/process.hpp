#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "highgain/types.hpp"

namespace highgain {

/// Frequency conversion couples a and c through a beam-splitter-like
/// interaction; type-II PDC couples a and b through a two-mode squeezer.
enum class ProcessKind { FC, PDC };

std::string_view to_string(ProcessKind kind);
ProcessKind parse_process_kind(std::string_view text);

/// Generic six-parameter process: Gaussian pump (width, amplitude folded into
/// `coupling`), first-order dispersion of the three fields and crystal length.
///
/// Units are arbitrary but must be consistent: slope * length * frequency is a
/// phase. Field 1 is `a`; field 2 is `c` for FC and `b` for PDC.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::FC;
  double sigma = 1.0;     ///< pump spectral width
  double coupling = 0.0;  ///< overall gain gamma >= 0 (all physical constants and E_p)
  double kp_slope = 0.0;  ///< pump inverse group velocity
  double k1_slope = 0.0;  ///< inverse group velocity of field a
  double k2_slope = 0.0;  ///< inverse group velocity of field c (FC) or b (PDC)
  double length = 1.0;    ///< crystal length L, crystal spans [-L/2, L/2]

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  ProcessSpec with_coupling(double gamma) const;
};

/// Phase mismatch is linear in both detunings: dk(nu, nu') = row * nu + col * nu'.
struct PhaseRates {
  double row = 0.0;
  double col = 0.0;
};

PhaseRates phase_rates(const ProcessSpec& spec);

/// Uniform detuning grid with its trapezoid (rectangle) weight.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n, double nu_min, double nu_max);

  static FrequencyGrid centered(std::size_t n, double half_width);

  std::size_t size() const noexcept { return points_.size(); }
  double nu_min() const noexcept { return nu_min_; }
  double nu_max() const noexcept { return nu_max_; }
  double weight() const noexcept { return weight_; }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const noexcept { return points_; }

 private:
  double nu_min_;
  double nu_max_;
  double weight_;
  std::vector<double> points_;
};

/// Uniform propagation grid with z_0 = -L/2 and z_{m-1} = +L/2.
class ZGrid {
 public:
  ZGrid(std::size_t m, double length);

  std::size_t size() const noexcept { return points_.size(); }
  double length() const noexcept { return length_; }
  double step() const noexcept { return step_; }
  double operator[](std::size_t l) const { return points_[l]; }
  const std::vector<double>& points() const noexcept { return points_; }

  /// Composite trapezoid weights (h/2 at both ends, h inside).
  std::vector<double> trapezoid_weights() const;

 private:
  double length_;
  double step_;
  std::vector<double> points_;
};

/// Larger of the pump width and the phasematching bandwidth 2 pi / (|k1 - k2| L).
double effective_bandwidth(const ProcessSpec& spec);

/// Default window half-width: five effective bandwidths.
double default_half_width(const ProcessSpec& spec);

FrequencyGrid default_grid(const ProcessSpec& spec, std::size_t n);

/// Unit-peak Gaussian pump envelope, evaluated at nu - nu' (FC) or nu + nu' (PDC).
cd pump_amplitude(const ProcessSpec& spec, double nu, double nu_prime);

/// First-order phase mismatch; zero at the central frequencies.
double phase_mismatch(const ProcessSpec& spec, double nu, double nu_prime);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Joint spectral amplitude with the frequency weight folded in:
/// values(i, j) = gamma * pump(nu_i, nu_j) * sinc(dk L / 2) * dnu.
struct JsaKernel {
  FrequencyGrid grid;
  CMatrix values;
};

JsaKernel build_jsa(const ProcessSpec& spec, const FrequencyGrid& grid);

/// How ZKernel multiplies by its real symmetric pump matrix P.
///  - Dense: one n x n GEMM per product.
///  - Auto: eigen-factorise P = W diag(lambda) W^T and keep the eigenpairs with
///    |lambda| > 1e-15 max|lambda| when that rank is below n / 4. The Gaussian
///    pump matrix has numerical rank ~35 on the default windows, so products
///    drop from O(n^3) to O(r n^2) at roundoff-level cost.
enum class PumpFactorization { Auto, Dense };

/// Real symmetric operator alpha * 1 + W diag(w) W^T, or a dense matrix.
class PumpOperator {
 public:
  PumpOperator() = default;
  PumpOperator(const RMatrix& p, PumpFactorization mode);

  bool factored() const noexcept { return factored_; }
  Eigen::Index rank() const noexcept { return factored_ ? basis_.cols() : dense_.rows(); }

  /// out = op * x (complex x, real operator).
  void apply(const CMatrix& x, CMatrix& out) const;

  /// (1 - beta op^2)^{-1} in the same representation. Throws
  /// InvalidArgument if the shifted matrix is singular.
  PumpOperator shifted_inverse_square(double beta) const;

  RMatrix dense() const;

 private:
  bool factored_ = false;
  double identity_ = 0.0;
  RMatrix basis_;     // n x r, orthonormal columns
  RVector weights_;   // r
  RMatrix dense_;
};

/// z-resolved coupling kernel
///   K_l(i, j) = -i gamma / L * pump(nu_i, nu_j) * exp(s i dk(nu_i, nu_j) z_l) * dnu,
/// s = -1 for FC and +1 for PDC.
///
/// Since dk is linear in both detunings the kernel factorises as
///   K_l = c * diag(row_phase_l) * P * diag(col_phase_l)
/// with a constant real symmetric P. Slices are generated from that form on
/// demand; a dense n x n x m array is never held.
class ZKernel {
 public:
  /// Which matrix a product applies: K, K^dagger, K^T or conj(K).
  enum class Form { Direct, Adjoint, Transpose, Conjugate };

  ZKernel(const ProcessSpec& spec, FrequencyGrid grid, ZGrid zgrid,
          PumpFactorization factorization = PumpFactorization::Auto);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  const ZGrid& zgrid() const noexcept { return zgrid_; }
  ProcessKind kind() const noexcept { return kind_; }

  /// -i gamma / L
  cd prefactor() const noexcept { return prefactor_; }
  /// pump(nu_i, nu_j) * dnu
  const RMatrix& pump_matrix() const noexcept { return pump_; }
  const PumpOperator& pump_operator() const noexcept { return pump_op_; }

  CVector row_phase(std::size_t l) const;
  CVector col_phase(std::size_t l) const;

  cd value(std::size_t i, std::size_t j, std::size_t l) const;
  CMatrix slice(std::size_t l) const;

  /// out = Form(K_l) * x, costing one pump product.
  void apply(Form form, std::size_t l, const CMatrix& x, CMatrix& out) const;

  /// Scalar factor of Form(K): prefactor or its conjugate.
  cd form_coefficient(Form form) const;
  /// Diagonal phase Form(K) applies to its operand before the pump product.
  CVector input_phase(Form form, std::size_t l) const;
  /// Diagonal phase Form(K) applies after the pump product.
  CVector output_phase(Form form, std::size_t l) const;

 private:
  ProcessKind kind_;
  FrequencyGrid grid_;
  ZGrid zgrid_;
  cd prefactor_;
  RMatrix pump_;
  PumpOperator pump_op_;
  double row_rate_;  // s * dk row coefficient
  double col_rate_;  // s * dk col coefficient
};

ZKernel build_z_kernel(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                       PumpFactorization factorization = PumpFactorization::Auto);

/// out = p * x for real p and complex row-major x, as one real GEMM on the
/// n x 2n real view of x.
void real_times_complex(const RMatrix& p, const CMatrix& x, CMatrix& out);

}  // namespace highgain
