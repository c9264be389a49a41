#include "crosstwin/sim/channel.hpp"

#include <algorithm>
#include <cmath>

namespace crosstwin::sim {

long latency_slots(double latency_mean_ms, double latency_std_ms, double slot_ms, std::mt19937_64& rng) {
  double ms = latency_mean_ms;
  if (latency_std_ms > 0.0) ms = std::normal_distribution<double>(latency_mean_ms, latency_std_ms)(rng);
  return std::max(1L, std::lround(ms / slot_ms));
}

InFlightPacket channel_send(std::size_t joint, double value, long slot, double latency_mean_ms,
                            double latency_std_ms, double slot_ms, std::mt19937_64& rng) {
  return {joint, value, slot, slot + latency_slots(latency_mean_ms, latency_std_ms, slot_ms, rng)};
}

}  // namespace crosstwin::sim
