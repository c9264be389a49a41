#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace crosstwin::kin {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using JointVector = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// One row of a modified (Craig) Denavit-Hartenberg table. `a` and `alpha`
/// belong to the preceding link, `d` to this joint; the joint angle is the
/// free variable that completes the row.
struct DHRow {
  double a = 0.0;
  double d = 0.0;
  double alpha = 0.0;
  int joint_index = 1;
};

struct Transform {
  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();

  static Transform identity() { return {}; }

  Eigen::Matrix4d homogeneous() const;

  Transform operator*(const Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
};

/// Serial revolute chain. `tool` is a fixed transform appended after the
/// last joint frame (identity when the end effector sits on frame I).
struct KinematicChain {
  std::vector<DHRow> rows;
  Transform tool = Transform::identity();

  std::size_t joint_count() const { return rows.size(); }
};

/// Throws ValidityError on empty chains, non-finite rows or duplicate joint indices.
void validate_chain(const KinematicChain& chain);

Transform dh_transform(const DHRow& row, double theta);

/// Pose of frame `i` (1-based) in the base frame.
Transform chain_transform(const KinematicChain& chain, const JointVector& joints, std::size_t i);

/// Frames 0..I followed by the tool frame; size I + 2.
std::vector<Transform> chain_frames(const KinematicChain& chain, const JointVector& joints);

Vector3 cross(const Vector3& a, const Vector3& b);

/// 6 x I geometric Jacobian of the end effector (tool frame origin).
/// Column i stacks z_i x (p_e - p_i) over z_i, where z_i and p_i are the
/// rotation axis and origin of joint i's own frame.
Jacobian geometric_jacobian(const KinematicChain& chain, const JointVector& joints);

}  // namespace crosstwin::kin
