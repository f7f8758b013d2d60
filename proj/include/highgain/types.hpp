#pragma once

#include <complex>

#include <Eigen/Dense>

namespace highgain {

using cd = std::complex<double>;

// Transfer matrices and kernel slices are row-major so that a complex matrix
// can be viewed as a real n x 2n matrix when it is multiplied from the left by
// a real matrix (see ZKernel::apply).
using CMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Mode families: one column per mode, sampled on the frequency grid.
using ModeMatrix = Eigen::MatrixXcd;

using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

}  // namespace highgain
