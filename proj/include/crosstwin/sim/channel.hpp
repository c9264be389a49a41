#pragma once

#include <cstddef>
#include <random>

namespace crosstwin::sim {

struct InFlightPacket {
  std::size_t joint = 0;
  double value = 0.0;
  long sent_slot = 0;
  long arrival_slot = 0;
};

/// Gaussian latency rounded to whole slots, never less than one slot.
long latency_slots(double latency_mean_ms, double latency_std_ms, double slot_ms, std::mt19937_64& rng);

InFlightPacket channel_send(std::size_t joint, double value, long slot, double latency_mean_ms,
                            double latency_std_ms, double slot_ms, std::mt19937_64& rng);

}  // namespace crosstwin::sim
