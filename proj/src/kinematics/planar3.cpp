#include "crosstwin/kinematics/planar3.hpp"

#include <cmath>

namespace crosstwin::kin {

PlanarPose planar3_fk(const Eigen::Vector3d& l, const Eigen::Vector3d& q) {
  const double a1 = q[0];
  const double a12 = q[0] + q[1];
  const double a123 = a12 + q[2];
  return {l[0] * std::cos(a1) + l[1] * std::cos(a12) + l[2] * std::cos(a123),
          l[0] * std::sin(a1) + l[1] * std::sin(a12) + l[2] * std::sin(a123),
          a123};
}

Eigen::Matrix3d planar3_jacobian(const Eigen::Vector3d& l, const Eigen::Vector3d& q) {
  const double a1 = q[0];
  const double a12 = q[0] + q[1];
  const double a123 = a12 + q[2];
  const double s3 = l[2] * std::sin(a123);
  const double s2 = l[1] * std::sin(a12) + s3;
  const double s1 = l[0] * std::sin(a1) + s2;
  // The y row differentiates sines, so it carries cosines.
  const double c3 = l[2] * std::cos(a123);
  const double c2 = l[1] * std::cos(a12) + c3;
  const double c1 = l[0] * std::cos(a1) + c2;

  Eigen::Matrix3d j;
  j << -s1, -s2, -s3,
        c1,  c2,  c3,
       1.0, 1.0, 1.0;
  return j;
}

}  // namespace crosstwin::kin
