#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace tibwb {

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Complex baseband samples, unit-power convention for data.
using ComplexBuffer = CVector<double>;
using RealBuffer = RVector<double>;

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

using Index = Eigen::Index;

/// Real scalar type underlying an Eigen expression (real or complex).
template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

}  // namespace tibwb
