#include "highgain/errors.hpp"

#include <sstream>

namespace highgain {

namespace {

std::string non_convergence_message(double residual, int iterations) {
  std::ostringstream os;
  os << "rigorous solver did not converge after " << iterations << " iterations (residual " << residual << ")";
  return os.str();
}

std::string pairing_message(const std::string& family, std::size_t mode, std::size_t first, std::size_t second,
                            double gap) {
  std::ostringstream os;
  os << "ambiguous pairing for " << family << " mode " << mode << ": candidates " << first << " and " << second
     << " differ in overlap by " << gap;
  return os.str();
}

}  // namespace

NonConvergence::NonConvergence(double residual, int iterations)
    : std::runtime_error(non_convergence_message(residual, iterations)),
      residual_(residual),
      iterations_(iterations) {}

PairingAmbiguity::PairingAmbiguity(const std::string& family, std::size_t mode, std::size_t first,
                                   std::size_t second, double gap)
    : std::runtime_error(pairing_message(family, mode, first, second, gap)),
      mode_(mode),
      first_(first),
      second_(second) {}

}  // namespace highgain
