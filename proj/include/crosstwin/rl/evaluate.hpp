#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

#include "crosstwin/rl/environment.hpp"
#include "crosstwin/rl/policy.hpp"

namespace crosstwin::rl {

enum class ActionMode { greedy, sample };

ActionMode parse_action_mode(std::string_view text);
std::string_view action_mode_name(ActionMode mode);

using ActionSelector = std::function<Action(const Eigen::VectorXd& observation, std::mt19937_64& rng)>;

ActionSelector policy_selector(const TwoBranchPolicy& policy, ActionMode mode);

struct CcdfPoint {
  double cost = 0.0;
  double exceed_fraction = 0.0;  // fraction of samples strictly above `cost`
};

struct EvaluationResult {
  double mean_packet_rate = 0.0;  // packets per second
  double mean_error = 0.0;
  double bound = 0.0;
  std::vector<double> discounted_costs;  // one per episode
  std::vector<CcdfPoint> ccdf;           // at every distinct sample, ascending
  double satisfied_fraction = 0.0;       // samples <= bound
};

/// Fraction of `samples` strictly greater than `x`.
double ccdf_at(const std::vector<double>& samples, double x);
std::vector<CcdfPoint> ccdf_table(std::vector<double> samples);

/// Runs `episodes` episodes and summarizes packet rate, error and the
/// distribution of the discounted episode cost.
EvaluationResult evaluate(const ActionSelector& select, const EnvironmentFactory& factory, std::size_t episodes,
                          std::uint64_t seed, double gamma, double bound);

}  // namespace crosstwin::rl
