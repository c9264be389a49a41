#pragma once

#include <string>

#include "crosstwin/sim/baseline.hpp"
#include "crosstwin/sim/config.hpp"

namespace crosstwin::sim {

/// `slot,tau_1,...,tau_I` into a playback source. Throws ConfigError.
TrajectorySource parse_trajectory_csv(const std::string& text);
std::string trajectory_csv(const TrajectorySource& source, const SimConfig& config, long first_slot,
                           std::size_t slots);
std::string metrics_csv(const Metrics& metrics);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace crosstwin::sim
