#include "highgain/rigorous.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "highgain/errors.hpp"

namespace highgain {

namespace {

using Form = ZKernel::Form;

// One coupled pair dX/dz = a_sign * Form_a(K) Y, dY/dz = Form_b(K) X with
// X(-L/2) = 1, Y(-L/2) = 0.
//   FC  (Ua, Vc):       dUa = -K Vc,       dVc = K^dag Ua
//   FC  (Uc, Va):       dUc = -K^dag Va,   dVa = K Uc
//   PDC (Ua, conj Vb):  dUa = K Vb*,       dVb* = K^dag Ua
//   PDC (Ub, conj Va):  dUb = K^T Va*,     dVa* = K* Ub
struct PairEquations {
  Form a_form;
  double a_sign;
  Form b_form;
};

struct PairResult {
  CMatrix x;
  CMatrix y;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

std::pair<PairEquations, PairEquations> pair_equations(ProcessKind kind) {
  if (kind == ProcessKind::FC) {
    return {{Form::Direct, -1.0, Form::Adjoint}, {Form::Adjoint, -1.0, Form::Direct}};
  }
  return {{Form::Direct, 1.0, Form::Adjoint}, {Form::Transpose, 1.0, Form::Conjugate}};
}

double relative_change(const CMatrix& now, const CMatrix& before) {
  const double diff = (now - before).norm();
  if (diff == 0.0) return 0.0;
  const double scale = std::max(now.norm(), before.norm());
  return diff / scale;
}

void check_grids(const FrequencyGrid& grid, const ZGrid& zgrid) {
  if (grid.size() < 2) throw InvalidArgument("frequency grid needs at least 2 points");
  if (zgrid.size() < 2) throw InvalidArgument("z grid needs at least 2 points");
}

PairResult picard_pair(const ZKernel& kernel, const PairEquations& eq, double tol, int max_iter) {
  const std::size_t m = kernel.zgrid().size();
  const Eigen::Index n = static_cast<Eigen::Index>(kernel.grid().size());
  const double half = 0.5 * kernel.zgrid().step();
  const CMatrix id = CMatrix::Identity(n, n);

  // Only U(z) is stored; V is rebuilt slice by slice from the previous U.
  std::vector<CMatrix> u(m, id);
  CMatrix u_end_old = id;
  CMatrix v_end_old = CMatrix::Zero(n, n);

  CMatrix v(n, n);
  CMatrix bu_prev(n, n);
  CMatrix bu(n, n);
  CMatrix av_prev(n, n);
  CMatrix av(n, n);

  PairResult out;
  for (int iter = 1; iter <= max_iter; ++iter) {
    v.setZero();
    av_prev.setZero();
    kernel.apply(eq.b_form, 0, u[0], bu_prev);
    for (std::size_t l = 1; l < m; ++l) {
      kernel.apply(eq.b_form, l, u[l], bu);
      v += half * (bu_prev + bu);
      kernel.apply(eq.a_form, l, v, av);
      u[l] = u[l - 1] + (half * eq.a_sign) * (av_prev + av);
      std::swap(bu_prev, bu);
      std::swap(av_prev, av);
    }
    const double change = std::max(relative_change(u[m - 1], u_end_old), relative_change(v, v_end_old));
    out.history.push_back(change);
    out.iterations = iter;
    out.residual = change;
    u_end_old = u[m - 1];
    v_end_old = v;
    if (change <= tol) break;
  }
  if (out.residual > tol) throw NonConvergence(out.residual, out.iterations);
  out.x = std::move(u_end_old);
  out.y = std::move(v_end_old);
  return out;
}

// Implicit trapezoid step
//   X_l = X_{l-1} + h/2 (A_{l-1} Y_{l-1} + A_l Y_l),  Y_l = Y_{l-1} + h/2 (B_{l-1} X_{l-1} + B_l X_l).
// Eliminating X_l gives (1 - h^2/4 B_l A_l) Y_l = RY + h/2 B_l RX, and
//   B_l A_l = a_sign |c|^2 D_l^* Q D_l,   Q = P^2,  D_l = input phase of A_l,
// so the step matrix is a fixed real matrix conjugated by D_l.
PairResult march_pair(const ZKernel& kernel, const PairEquations& eq) {
  const std::size_t m = kernel.zgrid().size();
  const Eigen::Index n = static_cast<Eigen::Index>(kernel.grid().size());
  const double h = kernel.zgrid().step();
  const double half = 0.5 * h;

  const double beta = 0.25 * h * h * eq.a_sign * std::norm(kernel.prefactor());
  const PumpOperator step_inverse = kernel.pump_operator().shifted_inverse_square(beta);

  CMatrix x = CMatrix::Identity(n, n);
  CMatrix y = CMatrix::Zero(n, n);
  CMatrix bx(n, n);
  CMatrix ay = CMatrix::Zero(n, n);
  CMatrix rx(n, n);
  CMatrix ry(n, n);
  CMatrix tmp(n, n);
  kernel.apply(eq.b_form, 0, x, bx);

  for (std::size_t l = 1; l < m; ++l) {
    rx = x + (half * eq.a_sign) * ay;
    ry = y + half * bx;
    kernel.apply(eq.b_form, l, rx, tmp);
    ry += half * tmp;
    const CVector d = kernel.input_phase(eq.a_form, l);
    tmp = d.asDiagonal() * ry;
    step_inverse.apply(tmp, y);
    y = d.conjugate().asDiagonal() * y;
    kernel.apply(eq.a_form, l, y, ay);
    x = rx + (half * eq.a_sign) * ay;
    kernel.apply(eq.b_form, l, x, bx);
  }

  PairResult out;
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

TransferMatrices assemble(ProcessKind kind, const FrequencyGrid& grid, PairResult first, PairResult second) {
  TransferMatrices tm;
  tm.kind = kind;
  tm.grid = grid;
  tm.Ua = std::move(first.x);
  tm.Ux = std::move(second.x);
  if (kind == ProcessKind::FC) {
    tm.Vx = std::move(first.y);
    tm.Va = std::move(second.y);
  } else {
    tm.Vx = first.y.conjugate();
    tm.Va = second.y.conjugate();
  }
  tm.iterations_used = std::max(first.iterations, second.iterations);
  tm.residual = std::max(first.residual, second.residual);
  const std::size_t sweeps = std::max(first.history.size(), second.history.size());
  for (std::size_t k = 0; k < sweeps; ++k) {
    const double a = k < first.history.size() ? first.history[k] : first.residual;
    const double b = k < second.history.size() ? second.history[k] : second.residual;
    tm.residual_history.push_back(std::max(a, b));
  }
  for (std::size_t k = 2; k < tm.residual_history.size(); ++k) {
    if (tm.residual_history[k] > tm.residual_history[k - 1]) tm.monotone_after_two = false;
  }
  return tm;
}

double entry_sum(const CMatrix& m) { return m.cwiseAbs().sum(); }

}  // namespace

std::string_view to_string(Scheme scheme) { return scheme == Scheme::Picard ? "picard" : "marching"; }

Scheme parse_scheme(std::string_view text) {
  if (text == "picard") return Scheme::Picard;
  if (text == "marching" || text == "march") return Scheme::Marching;
  throw InvalidArgument("unknown solver scheme '" + std::string(text) + "' (expected picard or marching)");
}

TransferMatrices identity_transfer(ProcessKind kind, const FrequencyGrid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  TransferMatrices tm;
  tm.kind = kind;
  tm.grid = grid;
  tm.Ua = CMatrix::Identity(n, n);
  tm.Ux = CMatrix::Identity(n, n);
  tm.Va = CMatrix::Zero(n, n);
  tm.Vx = CMatrix::Zero(n, n);
  return tm;
}

TransferMatrices picard_solve(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid, double tol,
                              int max_iter) {
  check_grids(grid, zgrid);
  if (!(tol > 0.0)) throw InvalidArgument("solver.tol must be positive");
  if (max_iter < 1) throw InvalidArgument("solver.max_iter must be at least 1");
  const ZKernel kernel(spec, grid, zgrid);
  const auto [first_eq, second_eq] = pair_equations(spec.kind);
  // Pairs are solved one after the other so only one U(z) history is alive.
  PairResult first = picard_pair(kernel, first_eq, tol, max_iter);
  PairResult second = picard_pair(kernel, second_eq, tol, max_iter);
  return assemble(spec.kind, grid, std::move(first), std::move(second));
}

TransferMatrices march_solve(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid) {
  check_grids(grid, zgrid);
  const ZKernel kernel(spec, grid, zgrid);
  const auto [first_eq, second_eq] = pair_equations(spec.kind);
  PairResult first = march_pair(kernel, first_eq);
  PairResult second = march_pair(kernel, second_eq);
  return assemble(spec.kind, grid, std::move(first), std::move(second));
}

TransferMatrices solve_rigorous(const ProcessSpec& spec, const FrequencyGrid& grid, const ZGrid& zgrid,
                                const SolverOptions& options) {
  if (options.scheme == Scheme::Marching) return march_solve(spec, grid, zgrid);
  return picard_solve(spec, grid, zgrid, options.tol, options.max_iter);
}

double CanonicalErrors::max() const {
  return std::max({identity_a, identity_x, cross, inverse_identity_a, inverse_identity_x, inverse_cross});
}

CanonicalErrors canonical_error(const TransferMatrices& tm) {
  const Eigen::Index n = tm.Ua.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const double scale = 0.5 * (entry_sum(tm.Va) + entry_sum(tm.Ux));
  const double norm = scale > 0.0 ? 1.0 / scale : 1.0;

  CanonicalErrors e;
  if (tm.kind == ProcessKind::FC) {
    e.identity_a = norm * entry_sum(tm.Ua * tm.Ua.adjoint() + tm.Va * tm.Va.adjoint() - id);
    e.identity_x = norm * entry_sum(tm.Ux * tm.Ux.adjoint() + tm.Vx * tm.Vx.adjoint() - id);
    e.cross = norm * entry_sum(tm.Ua * tm.Vx.adjoint() - tm.Va * tm.Ux.adjoint());
    e.inverse_identity_a = norm * entry_sum(tm.Ua.adjoint() * tm.Ua + tm.Vx.adjoint() * tm.Vx - id);
    e.inverse_identity_x = norm * entry_sum(tm.Ux.adjoint() * tm.Ux + tm.Va.adjoint() * tm.Va - id);
    e.inverse_cross = norm * entry_sum(tm.Ua.adjoint() * tm.Va - tm.Vx.adjoint() * tm.Ux);
  } else {
    e.identity_a = norm * entry_sum(tm.Ua * tm.Ua.adjoint() - tm.Va * tm.Va.adjoint() - id);
    e.identity_x = norm * entry_sum(tm.Ux * tm.Ux.adjoint() - tm.Vx * tm.Vx.adjoint() - id);
    e.cross = norm * entry_sum(tm.Ua * tm.Vx.transpose() - tm.Va * tm.Ux.transpose());
    const CMatrix vxv = tm.Vx.adjoint() * tm.Vx;
    const CMatrix vav = tm.Va.adjoint() * tm.Va;
    const CMatrix uxv = tm.Ux.adjoint() * tm.Vx;
    e.inverse_identity_a = norm * entry_sum(tm.Ua.adjoint() * tm.Ua - vxv.transpose() - id);
    e.inverse_identity_x = norm * entry_sum(tm.Ux.adjoint() * tm.Ux - vav.transpose() - id);
    e.inverse_cross = norm * entry_sum(tm.Ua.adjoint() * tm.Va - uxv.transpose());
  }
  return e;
}

}  // namespace highgain
