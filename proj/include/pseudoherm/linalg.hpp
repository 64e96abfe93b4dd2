#pragma once

#include <complex>

#include <Eigen/Dense>

namespace pseudoherm {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

}  // namespace pseudoherm
