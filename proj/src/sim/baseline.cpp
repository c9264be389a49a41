#include "crosstwin/sim/baseline.hpp"

namespace crosstwin::sim {

Metrics run_baseline(const SimConfig& config, const kin::KinematicChain& chain,
                     const TrajectorySource& source, std::uint64_t seed) {
  Simulator sim(config, chain, source);
  sim.reset(seed);
  const std::vector<int> ones(config.joint_count, 1);
  Metrics m;
  double packets = 0.0;
  for (std::size_t k = 0; k < config.episode_length; ++k) {
    const auto out = sim.advance(ones, {}, false);
    if (k < config.prediction_window) continue;
    m.rows.push_back({out.slot, out.packets, out.reward, out.cost, out.position_error});
    packets += out.packets;
    m.mean_cost += out.cost;
    m.mean_error += out.position_error;
    m.total_reward += out.reward;
  }
  const double n = static_cast<double>(m.rows.size());
  m.packet_rate = packets / (n * config.slot_seconds());
  m.mean_cost /= n;
  m.mean_error /= n;
  return m;
}

}  // namespace crosstwin::sim
