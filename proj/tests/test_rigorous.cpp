#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "highgain/analytic.hpp"
#include "highgain/errors.hpp"
#include "highgain/rigorous.hpp"

using namespace highgain;

namespace {

ProcessSpec preset_spec(ProcessKind kind, double gamma) {
  ProcessSpec s;
  s.kind = kind;
  s.sigma = kind == ProcessKind::FC ? 0.98190 : 0.96231155;
  s.coupling = gamma;
  s.kp_slope = 3.0;
  s.k1_slope = 4.5;
  s.k2_slope = 1.5;
  s.length = 2.0;
  return s;
}

struct Blocks {
  Eigen::MatrixXcd ua, ux, va, vx;
};

// With all group velocities equal the kernel is z-independent and the
// continuous transfer is a single matrix exponential of the field generator.
Blocks exponential_oracle(const ProcessSpec& spec, const FrequencyGrid& g) {
  const ZKernel k(spec, g, ZGrid(2, spec.length));
  const Eigen::MatrixXcd kz = k.slice(0);
  const Eigen::Index n = kz.rows();
  const bool fc = spec.kind == ProcessKind::FC;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  gen.topRightCorner(n, n) = kz;
  gen.bottomLeftCorner(n, n) = fc ? Eigen::MatrixXcd(-kz.adjoint()) : Eigen::MatrixXcd(kz.adjoint());
  const Eigen::MatrixXcd t = (spec.length * gen).exp();
  Blocks b;
  b.ua = t.topLeftCorner(n, n);
  b.va = t.topRightCorner(n, n);
  if (fc) {
    b.ux = t.bottomRightCorner(n, n);
    b.vx = -t.bottomLeftCorner(n, n);
  } else {
    b.ux = t.bottomRightCorner(n, n).conjugate();
    b.vx = t.bottomLeftCorner(n, n).conjugate();
  }
  return b;
}

double distance(const TransferMatrices& tm, const Blocks& b) {
  return std::max({(Eigen::MatrixXcd(tm.Ua) - b.ua).norm() / b.ua.norm(),
                   (Eigen::MatrixXcd(tm.Ux) - b.ux).norm() / b.ux.norm(),
                   (Eigen::MatrixXcd(tm.Va) - b.va).norm() / b.va.norm(),
                   (Eigen::MatrixXcd(tm.Vx) - b.vx).norm() / b.vx.norm()});
}

}  // namespace

TEST_CASE("zero coupling is the identity") {
  for (ProcessKind kind : {ProcessKind::FC, ProcessKind::PDC}) {
    const ProcessSpec spec = preset_spec(kind, 0.0);
    const FrequencyGrid g = default_grid(spec, 40);
    for (Scheme scheme : {Scheme::Picard, Scheme::Marching}) {
      const TransferMatrices tm = solve_rigorous(spec, g, ZGrid(40, spec.length), {1e-8, 50, scheme});
      CHECK(tm.Ua.isIdentity(0.0));
      CHECK(tm.Ux.isIdentity(0.0));
      CHECK(tm.Va.isZero(0.0));
      CHECK(tm.Vx.isZero(0.0));
      CHECK(canonical_error(tm).max() == 0.0);
    }
  }
}

TEST_CASE("phase-matched transfer converges to the matrix exponential at second order") {
  for (ProcessKind kind : {ProcessKind::FC, ProcessKind::PDC}) {
    ProcessSpec spec = preset_spec(kind, 0.8);
    spec.k1_slope = spec.k2_slope = spec.kp_slope;
    const FrequencyGrid g = FrequencyGrid::centered(16, 4.0);
    const Blocks oracle = exponential_oracle(spec, g);
    const double coarse = distance(march_solve(spec, g, ZGrid(51, spec.length)), oracle);
    const double fine = distance(march_solve(spec, g, ZGrid(101, spec.length)), oracle);
    CHECK(fine < 2e-4);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("Picard and marching share a fixed point") {
  for (ProcessKind kind : {ProcessKind::FC, ProcessKind::PDC}) {
    const ProcessSpec spec = preset_spec(kind, 1.0);
    const FrequencyGrid g = default_grid(spec, 50);
    const ZGrid z(50, spec.length);
    const TransferMatrices p = picard_solve(spec, g, z, 1e-12, 200);
    const TransferMatrices m = march_solve(spec, g, z);
    CHECK((p.Ua - m.Ua).norm() < 1e-9 * m.Ua.norm());
    CHECK((p.Va - m.Va).norm() < 1e-9 * m.Va.norm());
    CHECK((p.Ux - m.Ux).norm() < 1e-9 * m.Ux.norm());
    CHECK((p.Vx - m.Vx).norm() < 1e-9 * m.Vx.norm());
    CHECK(p.iterations_used > 2);
    CHECK(p.residual <= 1e-12);
    CHECK(p.monotone_after_two);
    CHECK(m.iterations_used == 0);
  }
}

TEST_CASE("canonical defect shrinks with the propagation step") {
  const ProcessSpec spec = preset_spec(ProcessKind::PDC, 1.2);
  const FrequencyGrid g = default_grid(spec, 60);
  const double coarse = canonical_error(march_solve(spec, g, ZGrid(60, spec.length))).max();
  const double fine = canonical_error(march_solve(spec, g, ZGrid(120, spec.length))).max();
  CHECK(fine < coarse / 3.0);
}

TEST_CASE("low gain approaches first-order perturbation theory") {
  // To first order Va = -i J (FC) or -i J (PDC); its singular values are the Schmidt values.
  for (ProcessKind kind : {ProcessKind::FC, ProcessKind::PDC}) {
    const ProcessSpec spec = preset_spec(kind, 1e-3);
    const FrequencyGrid g = default_grid(spec, 40);
    const TransferMatrices tm = march_solve(spec, g, ZGrid(400, spec.length));
    const Eigen::MatrixXcd first = cd(0.0, -1.0) * Eigen::MatrixXcd(build_jsa(spec, g).values);
    CHECK((Eigen::MatrixXcd(tm.Va) - first).norm() < 1e-3 * first.norm());
  }
}

TEST_CASE("iteration cap raises NonConvergence") {
  const ProcessSpec spec = preset_spec(ProcessKind::FC, 1.0);
  const FrequencyGrid g = default_grid(spec, 30);
  CHECK_THROWS_AS(picard_solve(spec, g, ZGrid(30, spec.length), 1e-8, 2), NonConvergence);
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("picard") == Scheme::Picard);
  CHECK(parse_scheme("marching") == Scheme::Marching);
  CHECK(parse_scheme("march") == Scheme::Marching);
  CHECK(to_string(Scheme::Marching) == "marching");
  CHECK_THROWS_AS(parse_scheme("rk4"), InvalidArgument);
}
