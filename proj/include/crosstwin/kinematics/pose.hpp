#pragma once

#include "crosstwin/kinematics/quaternion.hpp"

namespace crosstwin::kin {

struct Pose {
  Vector3 position = Vector3::Zero();
  Quaternion orientation;
};

/// End-effector pose; the orientation is canonicalized.
Pose forward_kinematics(const KinematicChain& chain, const JointVector& joints);

/// Weighted position + quaternion-component distance between two poses.
double pose_error(const Pose& real, const Pose& virt, double w_position, double w_orientation);

}  // namespace crosstwin::kin
