#include "crosstwin/kinematics/chains.hpp"

#include <numbers>

namespace crosstwin::kin {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

KinematicChain panda7_chain() {
  KinematicChain chain;
  chain.rows = {
      {0.0, 0.333, 0.0, 1},
      {0.0, 0.0, -kHalfPi, 2},
      {0.0, 0.316, kHalfPi, 3},
      {0.0825, 0.0, kHalfPi, 4},
      {-0.0825, 0.384, -kHalfPi, 5},
      {0.0, 0.0, kHalfPi, 6},
      {0.088, 0.0, kHalfPi, 7},
  };
  return chain;
}

KinematicChain panda5_chain() {
  const KinematicChain full = panda7_chain();
  KinematicChain chain;
  chain.rows.assign(full.rows.begin(), full.rows.begin() + 5);
  chain.tool = dh_transform(full.rows[5], 0.0) * dh_transform(full.rows[6], 0.0);
  return chain;
}

KinematicChain planar3_chain(const Eigen::Vector3d& lengths) {
  KinematicChain chain;
  chain.rows = {
      {0.0, 0.0, 0.0, 1},
      {lengths[0], 0.0, 0.0, 2},
      {lengths[1], 0.0, 0.0, 3},
  };
  chain.tool = dh_transform({lengths[2], 0.0, 0.0, 4}, 0.0);
  return chain;
}

std::optional<KinematicChain> builtin_chain(std::string_view name) {
  if (name == "panda7") return panda7_chain();
  if (name == "panda5") return panda5_chain();
  if (name == "planar3") return planar3_chain(kDefaultPlanarLengths);
  return std::nullopt;
}

}  // namespace crosstwin::kin
