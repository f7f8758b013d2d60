#include "highgain/bloch_messiah.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "highgain/errors.hpp"

namespace highgain {

namespace {

constexpr double kClusterGap = 1e-6;
constexpr double kAmbiguityGap = 1e-6;
constexpr double kClampWindow = 1e-6;
// Coefficients below this are treated as zero when fixing phases or targets.
constexpr double kNegligible = 1e-10;

using Dense = Eigen::MatrixXcd;

// A block of (near-)degenerate eigenvectors with the directions already
// handed out, stored as orthonormal coefficient vectors in the block basis.
struct Block {
  Dense basis;
  double value = 0.0;
  Dense used;  // d x k

  Eigen::Index dim() const { return basis.cols(); }
  Eigen::Index free() const { return basis.cols() - used.cols(); }

  CVector residual_coefficients(const CVector& t) const {
    CVector y = basis.adjoint() * t;
    if (used.cols() > 0) y -= used * (used.adjoint() * y);
    return y;
  }

  CVector take(CVector y) {
    // Re-orthogonalise once against the used directions for stability.
    if (used.cols() > 0) y -= used * (used.adjoint() * y);
    y.normalize();
    used.conservativeResize(basis.cols(), used.cols() + 1);
    used.col(used.cols() - 1) = y;
    return basis * y;
  }

  CVector take_any() {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index j = 0; j < dim(); ++j) {
      CVector e = CVector::Zero(dim());
      e(j) = 1.0;
      if (used.cols() > 0) e -= used * (used.adjoint() * e);
      const double nrm = e.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = j;
      }
    }
    CVector e = CVector::Zero(dim());
    e(best) = 1.0;
    return take(e);
  }
};

class Family {
 public:
  Family(const char* name, const Dense& hermitian) : name_(name) {
    Eigen::SelfAdjointEigenSolver<Dense> eig(hermitian);
    const RVector& lambda = eig.eigenvalues();
    const Dense& vectors = eig.eigenvectors();
    const Eigen::Index n = lambda.size();
    Eigen::Index begin = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      const bool split =
          k == n || lambda(k) - lambda(k - 1) > kClusterGap * std::max(1.0, std::abs(lambda(k)));
      if (!split) continue;
      Block b;
      b.basis = vectors.middleCols(begin, k - begin);
      b.value = lambda.segment(begin, k - begin).mean();
      b.used.resize(k - begin, 0);
      blocks_.push_back(std::move(b));
      begin = k;
    }
  }

  /// Unit vector for mode `mode`, matched via `target` when it is informative
  /// and otherwise taken from the free block whose eigenvalue is nearest
  /// `expected`.
  CVector pick(std::size_t mode, const CVector& target, double expected) {
    const double tnorm = target.norm();
    if (tnorm > kNegligible) {
      const CVector t = target / tnorm;
      std::size_t best = blocks_.size();
      std::size_t second = blocks_.size();
      double best_ov = -1.0;
      double second_ov = -1.0;
      CVector best_y;
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (blocks_[b].free() == 0) continue;
        CVector y = blocks_[b].residual_coefficients(t);
        const double ov = y.squaredNorm();
        if (ov > best_ov) {
          second = best;
          second_ov = best_ov;
          best = b;
          best_ov = ov;
          best_y = std::move(y);
        } else if (ov > second_ov) {
          second = b;
          second_ov = ov;
        }
      }
      if (best < blocks_.size() && best_ov > kNegligible) {
        if (second < blocks_.size() && second_ov > 0.25 && best_ov - second_ov < kAmbiguityGap) {
          throw PairingAmbiguity(name_, mode, best, second, best_ov - second_ov);
        }
        return blocks_[best].take(best_y);
      }
    }
    std::size_t nearest = blocks_.size();
    double distance = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (blocks_[b].free() == 0) continue;
      const double d = std::abs(blocks_[b].value - expected);
      if (nearest == blocks_.size() || d < distance) {
        nearest = b;
        distance = d;
      }
    }
    if (nearest == blocks_.size()) throw CanonicalViolation("mode family " + std::string(name_) + " exhausted");
    return blocks_[nearest].take_any();
  }

 private:
  const char* name_;
  std::vector<Block> blocks_;
};

// Multiply v by a unit phase so that `coefficient(v)` becomes real positive,
// where the coefficient is linear in v (conjugate_linear = false) or in conj(v).
bool align_phase(CVector& v, cd coefficient, bool conjugate_linear) {
  const double mag = std::abs(coefficient);
  if (mag <= kNegligible) return false;
  const cd rot = conjugate_linear ? coefficient / mag : std::conj(coefficient) / mag;
  v *= rot;
  return true;
}

void align_peak(CVector& v) {
  // Peak of conj(v) real positive is the same as peak of v real positive.
  v *= peak_phase(v);
}

std::vector<double> extract_r(ProcessKind kind, const RVector& s) {
  std::vector<double> r(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double sk = s(k);
    if (kind == ProcessKind::PDC) {
      r[static_cast<std::size_t>(k)] = std::asinh(sk);
      continue;
    }
    if (sk > 1.0 + kClampWindow) {
      throw CanonicalViolation("FC V singular value " + std::to_string(sk) +
                               " exceeds 1; the transfer matrices are not unitary");
    }
    r[static_cast<std::size_t>(k)] = std::asin(std::min(sk, 1.0));
  }
  return r;
}

double cos_like(ProcessKind kind, double r) { return kind == ProcessKind::FC ? std::cos(r) : std::cosh(r); }
double sin_like(ProcessKind kind, double r) { return kind == ProcessKind::FC ? std::sin(r) : std::sinh(r); }

ModeMatrix to_functions(const Dense& vectors, double weight) {
  return vectors.conjugate() / std::sqrt(weight);
}

Dense to_vectors(const ModeMatrix& functions, double weight) { return functions.conjugate() * std::sqrt(weight); }

double relative_frobenius(const Dense& m, const Dense& approx) {
  const double nrm = m.norm();
  const double diff = (m - approx).norm();
  if (nrm == 0.0) return diff;
  return diff / nrm;
}

void check_shapes(const TransferMatrices& tm) {
  const Eigen::Index n = tm.Ua.rows();
  if (n == 0 || tm.Ua.cols() != n || tm.Ux.rows() != n || tm.Ux.cols() != n || tm.Va.rows() != n ||
      tm.Va.cols() != n || tm.Vx.rows() != n || tm.Vx.cols() != n) {
    throw InvalidArgument("transfer matrices must be square and of equal size");
  }
}

ModeSpectrum assemble(const TransferMatrices& tm, std::vector<double> r, const Dense& o, const Dense& p,
                      const Dense& f, const Dense& x) {
  ModeSpectrum out;
  out.kind = tm.kind;
  out.grid = tm.grid;
  out.r = std::move(r);
  const double w = tm.grid.weight();
  out.out_a = to_functions(o, w);
  out.in_a = to_functions(p, w);
  out.in_b = to_functions(f, w);
  out.out_b = to_functions(x, w);
  return out;
}

Dense polar_factor(const Dense& a) {
  Eigen::BDCSVD<Dense> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ModeSpectrum decompose_svd_polar(const TransferMatrices& tm) {
  const Eigen::Index n = tm.Ua.rows();
  const bool pdc = tm.kind == ProcessKind::PDC;
  const Dense va = tm.Va;

  Eigen::BDCSVD<Dense> svd(va, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  std::vector<double> r = extract_r(tm.kind, s);
  const bool trivial = s.size() == 0 || s(0) == 0.0;
  Dense o = trivial ? Dense::Identity(n, n) : Dense(svd.matrixU());
  Dense right = trivial ? Dense::Identity(n, n) : Dense(svd.matrixV());
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd phase = peak_phase(o.col(k));
    o.col(k) *= phase;
    right.col(k) *= phase;
  }
  // FC: Va = O S F^+.  PDC: Va = O S F^T = O S conj(F)^+.
  const Dense f = pdc ? Dense(right.conjugate()) : right;
  const Dense p = polar_factor(Dense(tm.Ua.adjoint()) * o);
  const Dense x = polar_factor(Dense(tm.Ux) * f);
  return assemble(tm, std::move(r), o, p, f, x);
}

ModeSpectrum decompose_hermitian_eigen(const TransferMatrices& tm) {
  const ProcessKind kind = tm.kind;
  const Eigen::Index n = tm.Ua.rows();
  const bool pdc = kind == ProcessKind::PDC;
  const Dense ua = tm.Ua;
  const Dense ux = tm.Ux;
  const Dense va = tm.Va;
  const Dense vx = tm.Vx;

  Eigen::BDCSVD<Dense> svd(va, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  const Dense left = s.size() && s(0) > 0.0 ? Dense(svd.matrixU()) : Dense::Identity(n, n);
  const std::vector<double> r = extract_r(kind, s);

  Family out_a("varphi", ua * ua.adjoint());
  Family in_a("psi", ua.adjoint() * ua);
  Family in_x("phi", ux.adjoint() * ux);
  Family out_x("xi", ux * ux.adjoint());

  Dense o(n, n);
  Dense p(n, n);
  Dense f(n, n);
  Dense x(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t mode = static_cast<std::size_t>(k);
    const double rk = r[mode];
    const double c = cos_like(kind, rk);
    const double sn = sin_like(kind, rk);
    const double expected = c * c;

    CVector ok = out_a.pick(mode, left.col(k), expected);
    align_peak(ok);

    CVector pk = in_a.pick(mode, ua.adjoint() * ok, expected);
    const bool p_fixed = align_phase(pk, ok.dot(ua * pk), false);

    // FC: Va F = sin O.  PDC: Va conj(F) = sinh O, so the target is conj(Va^+ O).
    CVector f_target = va.adjoint() * ok;
    if (pdc) f_target = f_target.conjugate();
    CVector fk = in_x.pick(mode, f_target, expected);
    if (pdc) {
      if (!align_phase(fk, ok.dot(va * fk.conjugate()), true)) align_peak(fk);
    } else if (!align_phase(fk, ok.dot(va * fk), false)) {
      align_peak(fk);
    }

    // X from Ux F = cos X, or from Vx P (FC) / Vx conj(P) (PDC) = sin X when that is larger.
    const CVector p_image = pdc ? CVector(vx * pk.conjugate()) : CVector(vx * pk);
    const bool via_u = c >= sn || !p_fixed;
    CVector xk = out_x.pick(mode, via_u ? CVector(ux * fk) : p_image, expected);
    const bool x_fixed = via_u ? align_phase(xk, xk.dot(ux * fk), true) : align_phase(xk, xk.dot(p_image), true);
    if (!x_fixed) align_peak(xk);

    if (!p_fixed) {
      const cd coeff = pdc ? xk.dot(vx * pk.conjugate()) : xk.dot(vx * pk);
      if (!align_phase(pk, coeff, pdc)) align_peak(pk);
    }

    o.col(k) = ok;
    p.col(k) = pk;
    f.col(k) = fk;
    x.col(k) = xk;
  }
  return assemble(tm, r, o, p, f, x);
}

}  // namespace

ModeSpectrum bloch_messiah(const TransferMatrices& tm, BlochMessiahMethod method) {
  check_shapes(tm);
  if (method == BlochMessiahMethod::HermitianEigen) return decompose_hermitian_eigen(tm);
  return decompose_svd_polar(tm);
}

double SymmetryReport::max_reconstruction() const {
  return std::max({reconstruction_ua, reconstruction_ux, reconstruction_va, reconstruction_vx});
}

SymmetryReport symmetry_check(const TransferMatrices& tm, const ModeSpectrum& modes, std::size_t overlap_modes) {
  const bool pdc = tm.kind == ProcessKind::PDC;
  const double w = tm.grid.weight();
  const Dense o = to_vectors(modes.out_a, w);
  const Dense p = to_vectors(modes.in_a, w);
  const Dense f = to_vectors(modes.in_b, w);
  const Dense x = to_vectors(modes.out_b, w);
  const Dense ua = tm.Ua;
  const Dense ux = tm.Ux;
  const Dense va = tm.Va;
  const Dense vx = tm.Vx;
  const Eigen::Index n = ua.rows();

  // Per-matrix expansion coefficients, taken from the matrices themselves.
  const Dense fa = pdc ? Dense(f.conjugate()) : f;
  const Dense pv = pdc ? Dense(p.conjugate()) : p;
  const Eigen::VectorXcd cu = (o.adjoint() * ua * p).diagonal();
  const Eigen::VectorXcd cva = (o.adjoint() * va * fa).diagonal();
  const Eigen::VectorXcd cux = (x.adjoint() * ux * f).diagonal();
  const Eigen::VectorXcd cvx = (x.adjoint() * vx * pv).diagonal();

  SymmetryReport rep;
  rep.reconstruction_ua = relative_frobenius(ua, o * cu.asDiagonal() * p.adjoint());
  rep.reconstruction_va = relative_frobenius(va, o * cva.asDiagonal() * fa.adjoint());
  rep.reconstruction_ux = relative_frobenius(ux, x * cux.asDiagonal() * f.adjoint());
  rep.reconstruction_vx = relative_frobenius(vx, x * cvx.asDiagonal() * pv.adjoint());

  // Unitarity: U-side Schmidt value from the Rayleigh quotient of U U^+ on the
  // paired output mode, V-side from sin r_k / sinh r_k.
  const Dense hu_a = ua * ua.adjoint();
  const Dense hu_x = ux * ux.adjoint();
  const double sign = pdc ? -1.0 : 1.0;
  rep.unitarity_per_mode.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sv = sin_like(tm.kind, modes.r[static_cast<std::size_t>(k)]);
    const double ca = o.col(k).dot(hu_a * o.col(k)).real();
    const double cx = x.col(k).dot(hu_x * x.col(k)).real();
    const double dev = std::max(std::abs(ca + sign * sv * sv - 1.0), std::abs(cx + sign * sv * sv - 1.0));
    rep.unitarity_per_mode[static_cast<std::size_t>(k)] = dev;
    rep.unitarity_deviation = std::max(rep.unitarity_deviation, dev);
  }

  const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(overlap_modes), n);
  rep.overlap_a = (w * (modes.in_a.leftCols(m).adjoint() * modes.out_a.leftCols(m))).cwiseAbs();
  rep.overlap_b = (w * (modes.in_b.leftCols(m).adjoint() * modes.out_b.leftCols(m))).cwiseAbs();
  return rep;
}

}  // namespace highgain
