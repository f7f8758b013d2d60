#include "highgain/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "highgain/errors.hpp"

namespace highgain {

namespace {

// Values closer than this (relative to r_1) count as ties.
constexpr double kTieTolerance = 1e-12;

}  // namespace

ModeSpectrum schmidt_decompose(const JsaKernel& kernel, ProcessKind kind) {
  if (!kernel.values.allFinite()) throw InvalidArgument("kernel contains non-finite entries");
  const FrequencyGrid& grid = kernel.grid;
  const Eigen::Index n = kernel.values.rows();
  if (n != static_cast<Eigen::Index>(grid.size()) || kernel.values.cols() != n) {
    throw InvalidArgument("kernel shape does not match its frequency grid");
  }

  const Eigen::MatrixXcd ij = cd(0.0, 1.0) * kernel.values;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(ij, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::MatrixXcd& u = svd.matrixU();
  const Eigen::MatrixXcd& v = svd.matrixV();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return sv(a) > sv(b); });
  // Within groups of tied values order by the peak position of the left vector.
  // Round-off-level values are left in descending order.
  const double tie = kTieTolerance * std::max(sv.size() ? sv.maxCoeff() : 0.0, 1e-300);
  for (std::size_t begin = 0; begin < order.size() && sv(order[begin]) > tie;) {
    std::size_t end = begin + 1;
    while (end < order.size() && sv(order[begin]) - sv(order[end]) <= tie) ++end;
    if (end - begin > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                       order.begin() + static_cast<std::ptrdiff_t>(end), [&](Eigen::Index a, Eigen::Index b) {
                         return peak_index(u.col(a)) < peak_index(u.col(b));
                       });
    }
    begin = end;
  }

  ModeSpectrum out;
  out.kind = kind;
  out.grid = grid;
  out.r.resize(static_cast<std::size_t>(n));
  out.in_a.resize(n, n);
  out.in_b.resize(n, n);
  const double inv_sqrt_w = 1.0 / std::sqrt(grid.weight());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const CVector left = u.col(src);
    const cd phase = peak_phase(left);
    out.r[static_cast<std::size_t>(k)] = sv(src);
    out.in_a.col(k) = phase * inv_sqrt_w * left;
    out.in_b.col(k) = phase * inv_sqrt_w * v.col(src);
  }
  out.out_a = out.in_a;
  out.out_b = out.in_b;
  return out;
}

ModeSpectrum analytic_solve(const ProcessSpec& spec, const FrequencyGrid& grid) {
  return schmidt_decompose(build_jsa(spec, grid), spec.kind);
}

std::vector<double> unit_schmidt_values(const ProcessSpec& spec, const FrequencyGrid& grid) {
  const JsaKernel jsa = build_jsa(spec.with_coupling(1.0), grid);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(jsa.values));
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> out(sv.data(), sv.data() + sv.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace highgain
