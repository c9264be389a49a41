#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "crosstwin/kinematics/transform.hpp"

namespace crosstwin::kin {

/// Franka Emika Panda, seven joints, modified DH. The end effector is frame 7.
KinematicChain panda7_chain();

/// First five Panda joints; joints 6 and 7 are frozen at zero and folded into the tool.
KinematicChain panda5_chain();

/// Planar three-link arm in the x-y plane; the last link length is the tool offset.
KinematicChain planar3_chain(const Eigen::Vector3d& lengths);

inline const Eigen::Vector3d kDefaultPlanarLengths{0.4, 0.3, 0.2};

/// "panda7", "panda5" or "planar3" (default link lengths).
std::optional<KinematicChain> builtin_chain(std::string_view name);

}  // namespace crosstwin::kin
