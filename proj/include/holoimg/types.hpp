#pragma once

#include <Eigen/Core>

#include <complex>
#include <numbers>

namespace holoimg {

using Complex = std::complex<double>;

/// 2D point: x() is cross-range, y() is range. Lengths are in central wavelengths.
using Point2 = Eigen::Vector2d;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// Reference wave speed in internal units.
///
/// Lengths are measured in central wavelengths and angular frequencies in units of
/// the central angular frequency, so a wave at the central frequency advances its
/// phase by 2*pi per unit length: c0 = 1 / (2*pi).
inline constexpr double kReferenceSpeed = 1.0 / (2.0 * kPi);

inline constexpr Complex kI{0.0, 1.0};

}  // namespace holoimg
