#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "highgain/bloch_messiah.hpp"
#include "highgain/errors.hpp"

using namespace highgain;

namespace {

Eigen::MatrixXcd random_unitary(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(dist(rng), dist(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  return qr.householderQ();
}

struct Synthetic {
  TransferMatrices tm;
  std::vector<double> r;
  Eigen::MatrixXcd o, p, f, x;
};

// Exactly canonical matrices assembled from known modes and distinct values.
Synthetic synthetic(ProcessKind kind, Eigen::Index n, double r_max, unsigned seed) {
  std::mt19937 rng(seed);
  Synthetic s;
  s.o = random_unitary(n, rng);
  s.p = random_unitary(n, rng);
  s.f = random_unitary(n, rng);
  s.x = random_unitary(n, rng);
  for (Eigen::Index k = 0; k < n; ++k) s.r.push_back(r_max * std::pow(0.6, static_cast<double>(k)));
  Eigen::VectorXd c(n), sn(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = s.r[static_cast<std::size_t>(k)];
    c(k) = kind == ProcessKind::FC ? std::cos(r) : std::cosh(r);
    sn(k) = kind == ProcessKind::FC ? std::sin(r) : std::sinh(r);
  }
  TransferMatrices& tm = s.tm;
  tm.kind = kind;
  tm.grid = FrequencyGrid::centered(static_cast<std::size_t>(n), 3.0);
  tm.Ua = s.o * c.asDiagonal() * s.p.adjoint();
  tm.Ux = s.x * c.asDiagonal() * s.f.adjoint();
  if (kind == ProcessKind::FC) {
    tm.Va = s.o * sn.asDiagonal() * s.f.adjoint();
    tm.Vx = s.x * sn.asDiagonal() * s.p.adjoint();
  } else {
    tm.Va = s.o * sn.asDiagonal() * s.f.transpose();
    tm.Vx = s.x * sn.asDiagonal() * s.p.transpose();
  }
  return s;
}

}  // namespace

TEST_CASE("decomposition recovers planted modes") {
  for (ProcessKind kind : {ProcessKind::FC, ProcessKind::PDC}) {
    for (BlochMessiahMethod method : {BlochMessiahMethod::SvdPolar, BlochMessiahMethod::HermitianEigen}) {
      const Synthetic s = synthetic(kind, 12, kind == ProcessKind::FC ? 1.3 : 2.0, 7);
      const ModeSpectrum modes = bloch_messiah(s.tm, method);
      const double sw = std::sqrt(s.tm.grid.weight());
      for (std::size_t k = 0; k < 6; ++k) {
        CHECK(modes.r[k] == doctest::Approx(s.r[k]).epsilon(1e-10));
        const auto kk = static_cast<Eigen::Index>(k);
        // Modes agree with the planted vectors up to a phase.
        const Eigen::VectorXcd o = modes.out_a.col(kk).conjugate() * sw;
        const Eigen::VectorXcd p = modes.in_a.col(kk).conjugate() * sw;
        CHECK(std::abs(std::abs(o.dot(s.o.col(kk))) - 1.0) < 1e-9);
        CHECK(std::abs(std::abs(p.dot(s.p.col(kk))) - 1.0) < 1e-9);
      }
      const SymmetryReport rep = symmetry_check(s.tm, modes);
      CHECK(rep.max_reconstruction() < 1e-10);
      CHECK(rep.unitarity_deviation < 1e-10);
    }
  }
}

TEST_CASE("rigorous transfer decomposes into orthonormal modes") {
  ProcessSpec spec;
  spec.kind = ProcessKind::PDC;
  spec.sigma = 0.96231155;
  spec.coupling = 1.0;
  spec.kp_slope = 3.0;
  spec.k1_slope = 4.5;
  spec.k2_slope = 1.5;
  spec.length = 2.0;
  const FrequencyGrid g = default_grid(spec, 60);
  const TransferMatrices tm = march_solve(spec, g, ZGrid(60, spec.length));
  const ModeSpectrum modes = bloch_messiah(tm);
  CHECK(orthonormality_error(g, modes.in_a, 60) < 1e-10);
  CHECK(orthonormality_error(g, modes.in_b, 60) < 1e-10);
  CHECK(orthonormality_error(g, modes.out_a, 60) < 1e-10);
  CHECK(orthonormality_error(g, modes.out_b, 60) < 1e-10);
  // r is arcsinh of the singular values of Va.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(tm.Va));
  CHECK(modes.r[0] == doctest::Approx(std::asinh(svd.singularValues()(0))).epsilon(1e-12));
  // Output mode convention: real positive peak.
  const Eigen::Index peak = peak_index(modes.out_a.col(0));
  CHECK(std::abs(modes.out_a(peak, 0).imag()) < 1e-12);
  CHECK(modes.out_a(peak, 0).real() > 0.0);
  const SymmetryReport rep = symmetry_check(tm, modes, 5);
  CHECK(rep.overlap_a.rows() == 5);
  CHECK(rep.max_reconstruction() < 1e-3);
}

TEST_CASE("identity transfer has zero values") {
  const TransferMatrices tm = identity_transfer(ProcessKind::FC, FrequencyGrid::centered(8, 2.0));
  const ModeSpectrum modes = bloch_messiah(tm);
  for (double r : modes.r) CHECK(r == 0.0);
  CHECK(symmetry_check(tm, modes).unitarity_deviation == 0.0);
}

TEST_CASE("non-canonical FC matrices are rejected") {
  Synthetic s = synthetic(ProcessKind::FC, 6, 1.0, 3);
  s.tm.Va *= 1.5;  // singular values beyond 1
  CHECK_THROWS_AS(bloch_messiah(s.tm), CanonicalViolation);
}
