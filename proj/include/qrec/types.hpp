#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qrec {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <class Scalar>
using RowVec2 = Eigen::Matrix<Scalar, 1, 2>;
template <class Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <class Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <class Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
template <class Scalar>
using Mat24 = Eigen::Matrix<Scalar, 2, 4>;
template <class Scalar>
using Mat34 = Eigen::Matrix<Scalar, 3, 4>;

template <class Scalar>
constexpr Scalar deg2rad(Scalar deg)
{
	return deg * static_cast<Scalar>(EIGEN_PI) / Scalar(180);
}

template <class Scalar>
constexpr Scalar rad2deg(Scalar rad)
{
	return rad * Scalar(180) / static_cast<Scalar>(EIGEN_PI);
}

/// arccos with the argument clamped to [-1, 1] so rounding noise on unit
/// vectors never produces a domain error.
template <class Scalar>
Scalar safe_acos(Scalar x)
{
	return std::acos(std::min(Scalar(1), std::max(Scalar(-1), x)));
}

}  // namespace qrec
