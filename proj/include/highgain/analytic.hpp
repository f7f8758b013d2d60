#pragma once

#include "highgain/modes.hpp"
#include "highgain/process.hpp"

namespace highgain {

/// Schmidt decomposition of a joint spectral amplitude,
///   i * J = sum_k r_k u_k v_k^dagger,   psi_k = u_k / sqrt(dnu),  phi_k = v_k / sqrt(dnu).
///
/// Without time ordering output modes equal input modes, so out_a = in_a and
/// out_b = in_b. Each pair is rotated so psi_k has a real positive peak; ties
/// in r_k are ordered by the peak index of psi_k.
ModeSpectrum schmidt_decompose(const JsaKernel& kernel, ProcessKind kind);

/// Time-ordering-free model: JSA, then its Schmidt decomposition.
/// r_k scales linearly with spec.coupling.
ModeSpectrum analytic_solve(const ProcessSpec& spec, const FrequencyGrid& grid);

/// Singular values of the unit-coupling JSA; analytic r_k = gamma * s_k.
std::vector<double> unit_schmidt_values(const ProcessSpec& spec, const FrequencyGrid& grid);

}  // namespace highgain
