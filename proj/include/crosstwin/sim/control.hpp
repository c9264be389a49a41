#pragma once

#include <cstddef>

#include "crosstwin/sim/config.hpp"

namespace crosstwin::sim {

double pd_control(double target, double target_rate, double prev_exec, double prev_rate, double kp, double kd,
                  PdForm form);

/// Zero-order hold refreshed every `interval` slots.
Eigen::VectorXd render(const Eigen::VectorXd& executed, const Eigen::VectorXd& previous, long slot,
                       std::size_t interval);

}  // namespace crosstwin::sim
