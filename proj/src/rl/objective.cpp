#include "crosstwin/rl/objective.hpp"

#include <algorithm>

namespace crosstwin::rl {

double ppo_clip_objective(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

double ppo_clip_objective_slope(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  if (ratio * advantage <= clipped * advantage) return advantage;
  return 0.0;
}

double constraint_bound(double cost_threshold, double gamma) { return cost_threshold / (1.0 - gamma); }

Branch crpo_select(double cvar_value, double cost_threshold, double gamma) {
  return cvar_value <= constraint_bound(cost_threshold, gamma) ? Branch::maximize_reward : Branch::minimize_cost;
}

std::string_view branch_name(Branch branch) {
  return branch == Branch::maximize_reward ? "reward" : "cost";
}

}  // namespace crosstwin::rl
