#pragma once

#include <cstdint>
#include <vector>

#include "crosstwin/sim/simulator.hpp"

namespace crosstwin::sim {

struct MetricsRow {
  long slot = 0;
  int packets = 0;
  double reward = 0.0;
  double cost = 0.0;
  double error = 0.0;  // end-effector position error, meters
};

struct Metrics {
  std::vector<MetricsRow> rows;  // post warm-up slots only
  double packet_rate = 0.0;      // packets per second
  double mean_cost = 0.0;
  double mean_error = 0.0;
  double total_reward = 0.0;
};

/// Every joint transmits every slot and reconstruction drives control.
Metrics run_baseline(const SimConfig& config, const kin::KinematicChain& chain,
                     const TrajectorySource& source, std::uint64_t seed);

}  // namespace crosstwin::sim
