#pragma once

#include <Eigen/Dense>

namespace crosstwin::kin {

struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

// Closed-form three-link planar arm.
PlanarPose planar3_fk(const Eigen::Vector3d& lengths, const Eigen::Vector3d& angles);

/// Rows are d(x, y, phi)/d(tau_1, tau_2, tau_3).
Eigen::Matrix3d planar3_jacobian(const Eigen::Vector3d& lengths, const Eigen::Vector3d& angles);

}  // namespace crosstwin::kin
