#pragma once

#include <Eigen/Dense>
#include <complex>

namespace omit {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using CMatrixd = CMatrix<double>;
using CVectord = CVector<double>;

template <typename Real>
constexpr std::complex<Real> imag_unit() { return {Real(0), Real(1)}; }

} // namespace omit
