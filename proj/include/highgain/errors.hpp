#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace highgain {

/// Rejected input: invalid spec, grid, option or config value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The rigorous solver did not reach its tolerance within max_iter sweeps.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(double residual, int iterations);

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Two candidate modes matched a singular vector equally well, so the mode
/// pairing between families is not unique.
class PairingAmbiguity : public std::runtime_error {
 public:
  PairingAmbiguity(const std::string& family, std::size_t mode, std::size_t first, std::size_t second,
                   double gap);

  std::size_t mode() const noexcept { return mode_; }
  std::size_t first_candidate() const noexcept { return first_; }
  std::size_t second_candidate() const noexcept { return second_; }

 private:
  std::size_t mode_;
  std::size_t first_;
  std::size_t second_;
};

/// Transfer matrices that violate the canonical structure by more than the
/// decomposition can absorb (e.g. a V singular value clearly above 1 for FC).
class CanonicalViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// find_coupling was asked for a value the chosen metric never attains.
class TargetUnreachable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace highgain
