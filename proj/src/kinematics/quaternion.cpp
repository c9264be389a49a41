#include "crosstwin/kinematics/quaternion.hpp"

#include <cmath>

#include "crosstwin/errors.hpp"

namespace crosstwin::kin {

double Quaternion::norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

Quaternion canonicalize(const Quaternion& q) {
  bool flip = false;
  if (q.w < 0.0) {
    flip = true;
  } else if (q.w == 0.0) {
    for (double c : {q.x, q.y, q.z}) {
      if (c != 0.0) {
        flip = c < 0.0;
        break;
      }
    }
  }
  return flip ? Quaternion{-q.x, -q.y, -q.z, -q.w} : q;
}

Quaternion rotation_to_quaternion(const Matrix3& r) {
  constexpr double kTol = 1e-6;
  const double ortho_err = (r.transpose() * r - Matrix3::Identity()).cwiseAbs().maxCoeff();
  if (!r.allFinite() || ortho_err > kTol || std::abs(r.determinant() - 1.0) > kTol) {
    throw ValidityError("matrix is not a proper rotation");
  }

  Quaternion q;
  const double trace = r.trace();
  if (trace >= r(0, 0) && trace >= r(1, 1) && trace >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q.w = 0.25 * s;
    q.x = (r(2, 1) - r(1, 2)) / s;
    q.y = (r(0, 2) - r(2, 0)) / s;
    q.z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (r(0, 1) + r(1, 0)) / s;
    q.z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.x = (r(0, 1) + r(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.x = (r(0, 2) + r(2, 0)) / s;
    q.y = (r(1, 2) + r(2, 1)) / s;
    q.z = 0.25 * s;
  }
  const double n = q.norm();
  return canonicalize({q.x / n, q.y / n, q.z / n, q.w / n});
}

Quaternion quaternion_from_axis_angle(const AxisAngle& aa) {
  if (!aa.axis.allFinite() || std::abs(aa.axis.norm() - 1.0) > 1e-9) {
    throw ValidityError("rotation axis is not a unit vector");
  }
  const double s = std::sin(0.5 * aa.angle);
  return {s * aa.axis.x(), s * aa.axis.y(), s * aa.axis.z(), std::cos(0.5 * aa.angle)};
}

Vector3 rotate(const Quaternion& q, const Vector3& v) {
  const Vector3 u{q.x, q.y, q.z};
  const Vector3 t = 2.0 * u.cross(v);
  return v + q.w * t + u.cross(t);
}

}  // namespace crosstwin::kin
