#include "crosstwin/sim/control.hpp"

namespace crosstwin::sim {

double pd_control(double target, double target_rate, double prev_exec, double prev_rate, double kp, double kd,
                  PdForm form) {
  const double damping = kd * (target_rate - prev_rate);
  // prev + kp (target - prev), arranged so unit gain reproduces the target exactly.
  if (form == PdForm::incremental) return kp * target + (1.0 - kp) * prev_exec + damping;
  return kp * (target - prev_exec) + damping;
}

Eigen::VectorXd render(const Eigen::VectorXd& executed, const Eigen::VectorXd& previous, long slot,
                       std::size_t interval) {
  return slot % static_cast<long>(interval) == 0 ? executed : previous;
}

}  // namespace crosstwin::sim
