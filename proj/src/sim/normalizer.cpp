#include "crosstwin/sim/normalizer.hpp"

#include <algorithm>

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

Eigen::VectorXd state_features(const kin::KinematicChain& chain, const Eigen::VectorXd& angles) {
  const auto n = angles.size();
  const kin::Jacobian jac = kin::geometric_jacobian(chain, angles);
  Eigen::VectorXd out(7 * n);
  out.head(n) = angles;
  for (Eigen::Index r = 0; r < 6; ++r) out.segment(n + r * n, n) = jac.row(r).transpose();
  return out;
}

Eigen::VectorXd MinMaxTable::apply(const Eigen::VectorXd& x) const {
  if (x.size() != lo.size()) throw DimensionError("feature vector does not match the normalization table");
  return ((x - lo).array() / (hi - lo).array()).max(0.0).min(1.0).matrix();
}

void MinMaxTable::validate() const {
  if (lo.size() != hi.size()) throw DimensionError("normalization bounds differ in length");
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] < hi[k])) {
      throw ValidityError("normalization range " + std::to_string(k) + " is empty or non-finite");
    }
  }
}

MinMaxTable calibrate(const SimConfig& config, const kin::KinematicChain& chain,
                      const TrajectorySource& source) {
  const long last = source.max_start(config.episode_length) + static_cast<long>(config.episode_length);
  const long stride = std::max(1L, last / 200000);
  MinMaxTable table;
  for (long s = 0; s <= last; s += stride) {
    const Eigen::VectorXd f = state_features(chain, source.angles(s, config.slot_seconds()));
    if (table.lo.size() == 0) {
      table.lo = f;
      table.hi = f;
    } else {
      table.lo = table.lo.cwiseMin(f);
      table.hi = table.hi.cwiseMax(f);
    }
  }
  for (Eigen::Index k = 0; k < table.lo.size(); ++k) {
    if (table.hi[k] - table.lo[k] < 1e-9) {
      table.lo[k] -= 0.5;
      table.hi[k] += 0.5;
    }
  }
  table.validate();
  return table;
}

}  // namespace crosstwin::sim
