#include "crosstwin/kinematics/transform.hpp"

#include <cmath>
#include <set>
#include <string>

#include "crosstwin/errors.hpp"

namespace crosstwin::kin {

Eigen::Matrix4d Transform::homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

void validate_chain(const KinematicChain& chain) {
  if (chain.rows.empty()) {
    throw ValidityError("kinematic chain has no joints");
  }
  std::set<int> seen;
  for (const auto& row : chain.rows) {
    if (!std::isfinite(row.a) || !std::isfinite(row.d) || !std::isfinite(row.alpha)) {
      throw ValidityError("DH row for joint " + std::to_string(row.joint_index) + " is not finite");
    }
    if (!seen.insert(row.joint_index).second) {
      throw ValidityError("duplicate joint index " + std::to_string(row.joint_index));
    }
  }
}

Transform dh_transform(const DHRow& row, double theta) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);

  Transform t;
  t.rotation << ct, -st, 0.0,
                st * ca, ct * ca, -sa,
                st * sa, ct * sa, ca;
  t.translation << row.a, -sa * row.d, ca * row.d;
  return t;
}

namespace {

void check_length(const KinematicChain& chain, const JointVector& joints) {
  if (static_cast<std::size_t>(joints.size()) != chain.joint_count()) {
    throw DimensionError("joint vector has " + std::to_string(joints.size()) +
                         " entries, chain has " + std::to_string(chain.joint_count()) + " joints");
  }
}

}  // namespace

Transform chain_transform(const KinematicChain& chain, const JointVector& joints, std::size_t i) {
  check_length(chain, joints);
  if (i < 1 || i > chain.joint_count()) {
    throw RangeError("frame index " + std::to_string(i) + " outside [1, " +
                     std::to_string(chain.joint_count()) + "]");
  }
  Transform t;
  for (std::size_t k = 0; k < i; ++k) {
    t = t * dh_transform(chain.rows[k], joints[static_cast<Eigen::Index>(k)]);
  }
  return t;
}

std::vector<Transform> chain_frames(const KinematicChain& chain, const JointVector& joints) {
  check_length(chain, joints);
  std::vector<Transform> frames;
  frames.reserve(chain.joint_count() + 2);
  frames.push_back(Transform::identity());
  for (std::size_t k = 0; k < chain.joint_count(); ++k) {
    frames.push_back(frames.back() * dh_transform(chain.rows[k], joints[static_cast<Eigen::Index>(k)]));
  }
  frames.push_back(frames.back() * chain.tool);
  return frames;
}

Vector3 cross(const Vector3& a, const Vector3& b) {
  return {a.y() * b.z() - b.y() * a.z(),
          b.x() * a.z() - a.x() * b.z(),
          a.x() * b.y() - b.x() * a.y()};
}

Jacobian geometric_jacobian(const KinematicChain& chain, const JointVector& joints) {
  const auto frames = chain_frames(chain, joints);
  const std::size_t n = chain.joint_count();
  const Vector3& end = frames.back().translation;

  Jacobian jac(6, static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    // Joint i turns about the z axis of frame i (modified DH).
    const Vector3 axis = frames[i].rotation * Vector3::UnitZ();
    const auto col = static_cast<Eigen::Index>(i - 1);
    jac.block<3, 1>(0, col) = cross(axis, end - frames[i].translation);
    jac.block<3, 1>(3, col) = axis;
  }
  return jac;
}

}  // namespace crosstwin::kin
