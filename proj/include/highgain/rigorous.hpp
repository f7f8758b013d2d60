#pragma once

#include <string_view>
#include <vector>

#include "highgain/process.hpp"
#include "highgain/types.hpp"

namespace highgain {

/// How the discretised transfer equations are solved.
///
/// Both schemes solve the same trapezoid-discretised Volterra system
///   X(z_l) = X(z_0) + sum_{l'} w_{ll'} A(z_l') Y(z_l'),   Y(z_l) = sum_{l'} w_{ll'} B(z_l') X(z_l'),
/// so they share one fixed point.
///  - Picard: fixed-point sweeps from U = 1, V = 0 until the end-of-crystal
///    matrices stop changing. Keeps the U(z) history (m slices per field pair).
///  - Marching: solves each implicit trapezoid step directly. O(n^2) memory,
///    no iteration; roughly the cost of two Picard sweeps.
enum class Scheme { Picard, Marching };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  Scheme scheme = Scheme::Picard;
};

/// Bogoliubov transfer matrices at z = +L/2 (weights folded in, so a
/// no-interaction crystal is the identity matrix). x is c for FC, b for PDC.
///
/// FC:   a_out = Ua a_in + Va c_in,    c_out = Ux c_in - Vx a_in
/// PDC:  a_out = Ua a_in + Va b_in^+,  b_out = Ux b_in + Vx a_in^+
struct TransferMatrices {
  ProcessKind kind = ProcessKind::FC;
  FrequencyGrid grid{2, -1.0, 1.0};
  CMatrix Ua;
  CMatrix Ux;
  CMatrix Va;
  CMatrix Vx;
  int iterations_used = 0;  ///< Picard sweeps (max over the two field pairs); 0 for Marching
  double residual = 0.0;    ///< last relative change
  std::vector<double> residual_history;  ///< per sweep, max over field pairs
  /// Whether the residual decreased at every sweep after the second one.
  bool monotone_after_two = true;
};

TransferMatrices identity_transfer(ProcessKind kind, const FrequencyGrid& grid);

/// Picard iteration of the coupled transfer equations. Throws NonConvergence
/// if the relative change is still above tol after max_iter sweeps.
TransferMatrices picard_solve(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid, double tol,
                              int max_iter);

/// Direct implicit-trapezoid march of the same discrete system.
TransferMatrices march_solve(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid);

TransferMatrices solve_rigorous(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                                const SolverOptions& options);

/// Entry-sum distance of each canonical condition from its expected value,
/// normalised by 0.5 * (sum |Va| + sum |Ux|).
struct CanonicalErrors {
  double identity_a = 0.0;          ///< Ua Ua^+ -/+ Va Va^+ = 1
  double identity_x = 0.0;          ///< Ux Ux^+ -/+ Vx Vx^+ = 1
  double cross = 0.0;               ///< FC: Ua Vx^+ - Va Ux^+ = 0;  PDC: Ua Vx^T - Va Ux^T = 0
  double inverse_identity_a = 0.0;  ///< FC: Ua^+ Ua + Vx^+ Vx = 1;  PDC: Ua^+ Ua - (Vx^+ Vx)^T = 1
  double inverse_identity_x = 0.0;  ///< FC: Ux^+ Ux + Va^+ Va = 1;  PDC: Ux^+ Ux - (Va^+ Va)^T = 1
  double inverse_cross = 0.0;       ///< FC: Ua^+ Va - Vx^+ Ux = 0;  PDC: Ua^+ Va - (Ux^+ Vx)^T = 0

  double max() const;
};

CanonicalErrors canonical_error(const TransferMatrices& tm);

}  // namespace highgain
