#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace rissim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double angle);

/// dB power value to linear scale.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace rissim
