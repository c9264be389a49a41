#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crosstwin/sim/config.hpp"

namespace crosstwin::sim {

/// Forecast for offsets 1..horizon past the last history value.
std::vector<double> predict(std::span<const double> history, PredictorKind kind, std::size_t horizon,
                            std::size_t fit_window);

double prediction_mse(std::span<const double> forecast, std::span<const double> truth);

}  // namespace crosstwin::sim
