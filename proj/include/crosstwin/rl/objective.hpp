#pragma once

#include <string_view>

namespace crosstwin::rl {

/// min(r A, clip(r, 1 - eps, 1 + eps) A).
double ppo_clip_objective(double ratio, double advantage, double clip);

/// d/dr of ppo_clip_objective; zero where the clipped term is selected.
double ppo_clip_objective_slope(double ratio, double advantage, double clip);

enum class Branch { maximize_reward, minimize_cost };

/// Reward ascent while cvar <= cost_threshold / (1 - gamma), cost descent otherwise.
Branch crpo_select(double cvar_value, double cost_threshold, double gamma);

double constraint_bound(double cost_threshold, double gamma);

std::string_view branch_name(Branch branch);

}  // namespace crosstwin::rl
