#include "crosstwin/kinematics/pose.hpp"

namespace crosstwin::kin {

Pose forward_kinematics(const KinematicChain& chain, const JointVector& joints) {
  const auto frames = chain_frames(chain, joints);
  const Transform& end = frames.back();
  return {end.translation, rotation_to_quaternion(end.rotation)};
}

double pose_error(const Pose& real, const Pose& virt, double w_position, double w_orientation) {
  const double position = (real.position - virt.position).norm();
  const double orientation = (real.orientation.coeffs() - virt.orientation.coeffs()).norm();
  return w_position * position + w_orientation * orientation;
}

}  // namespace crosstwin::kin
