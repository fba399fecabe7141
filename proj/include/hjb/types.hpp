#pragma once

#include <Eigen/Dense>

namespace hjb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Points and velocities live in at most two dimensions; one-dimensional
// problems use component 0 and keep component 1 at zero.
using Vec2 = Eigen::Vector2d;

inline Vec2 point1d(double x) { return Vec2(x, 0.0); }

} // namespace hjb
