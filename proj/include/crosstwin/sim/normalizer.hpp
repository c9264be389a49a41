#pragma once

#include <Eigen/Dense>

#include "crosstwin/kinematics/transform.hpp"
#include "crosstwin/sim/config.hpp"

namespace crosstwin::sim {

/// Joint angles followed by the row-major geometric Jacobian (I + 6I values).
Eigen::VectorXd state_features(const kin::KinematicChain& chain, const Eigen::VectorXd& angles);

struct MinMaxTable {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  /// (x - lo) / (hi - lo), clamped to [0, 1].
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  void validate() const;
};

/// Feature ranges over every slot an episode can visit. Flat components get
/// a +-0.5 margin so the table always has lo < hi.
MinMaxTable calibrate(const SimConfig& config, const kin::KinematicChain& chain,
                      const TrajectorySource& source);

}  // namespace crosstwin::sim
