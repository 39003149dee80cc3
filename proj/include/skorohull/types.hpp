#pragma once

#include <Eigen/Dense>

namespace skorohull {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Default tolerances shared across modules.
inline constexpr double kGeometryTol = 1e-9;
inline constexpr double kHullTol = 1e-7;

}  // namespace skorohull
