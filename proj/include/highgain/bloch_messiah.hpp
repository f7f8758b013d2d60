#pragma once

#include <vector>

#include "highgain/modes.hpp"
#include "highgain/rigorous.hpp"

namespace highgain {

/// Normal form of the rigorous transfer matrices. With column vectors
/// O = conj(varphi) sqrt(dnu), P = conj(psi) sqrt(dnu), F = conj(phi) sqrt(dnu),
/// X = conj(xi) sqrt(dnu):
///
///   FC:   Ua = sum cos r O P^+    Va = sum sin r O F^+    Ux = sum cos r X F^+    Vx = sum sin r X P^+
///   PDC:  Ua = sum cosh r O P^+   Va = sum sinh r O F^T   Ux = sum cosh r X F^+   Vx = sum sinh r X P^T
///
/// r_k always comes from the singular values of Va (FC: arcsin, clamped only
/// within 1e-6 of 1, otherwise CanonicalViolation; PDC: arcsinh).
///
/// Both methods agree for exactly canonical matrices and differ in how the
/// discretisation defect D = Ua Ua^+ +/- Va Va^+ - 1 leaks into the modes.
///  - SvdPolar: O, F from the singular vectors of Va; P and X as the unitary
///    polar factors of Ua^+ O and Ux F. Expansion error is O(|D|).
///  - HermitianEigen: O, P, F, X as eigenvectors of Ua Ua^+, Ua^+ Ua, Ux^+ Ux
///    and Ux Ux^+, blocks of eigenvalues closer than 1e-6 treated as
///    degenerate, each mode matched to its block through a target vector (a
///    singular vector of Va or the image of an already fixed mode). Expansion
///    error is O(|D| / eigenvalue gap). Throws PairingAmbiguity when a target
///    splits evenly (to 1e-6) between two blocks.
///
/// Phases: varphi_k has a real positive peak; the others make the expansion
/// coefficients real positive.
enum class BlochMessiahMethod { SvdPolar, HermitianEigen };

ModeSpectrum bloch_messiah(const TransferMatrices& tm, BlochMessiahMethod method = BlochMessiahMethod::SvdPolar);

struct SymmetryReport {
  /// max_k |cos^2 r_k^U + sin^2 r_k^V - 1| (FC) or |cosh^2 r_k^U - sinh^2 r_k^V - 1| (PDC)
  double unitarity_deviation = 0.0;
  std::vector<double> unitarity_per_mode;
  /// ||M - expansion(M)||_F / ||M||_F for Ua, Ux, Va, Vx
  double reconstruction_ua = 0.0;
  double reconstruction_ux = 0.0;
  double reconstruction_va = 0.0;
  double reconstruction_vx = 0.0;
  /// |dnu <psi_j, varphi_k>| and |dnu <phi_j, xi_k>| over the leading modes
  Eigen::MatrixXd overlap_a;
  Eigen::MatrixXd overlap_b;

  double max_reconstruction() const;
};

/// Unitarity, reconstruction and input/output overlap diagnostics for a
/// decomposition of `tm`. `overlap_modes` bounds the overlap matrices.
SymmetryReport symmetry_check(const TransferMatrices& tm, const ModeSpectrum& modes, std::size_t overlap_modes = 10);

}  // namespace highgain
