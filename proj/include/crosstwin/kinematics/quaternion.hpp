#pragma once

#include "crosstwin/kinematics/transform.hpp"

namespace crosstwin::kin {

struct Quaternion {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  double norm() const;
  Eigen::Vector4d coeffs() const { return {x, y, z, w}; }
};

struct AxisAngle {
  Vector3 axis = Vector3::UnitZ();
  double angle = 0.0;
};

/// Picks the sign with w > 0; when w == 0 the first nonzero of x, y, z is made positive.
Quaternion canonicalize(const Quaternion& q);

/// Largest-pivot conversion; result is canonical. Throws ValidityError when
/// the input is not a proper rotation within 1e-6.
Quaternion rotation_to_quaternion(const Matrix3& rotation);

/// Throws ValidityError unless |axis| == 1 within 1e-9.
Quaternion quaternion_from_axis_angle(const AxisAngle& aa);

Vector3 rotate(const Quaternion& q, const Vector3& v);

}  // namespace crosstwin::kin
