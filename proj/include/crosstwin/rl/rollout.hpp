#pragma once

#include <vector>

#include "crosstwin/rl/environment.hpp"

namespace crosstwin::rl {

struct RolloutBuffer {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Action> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> costs;
  std::vector<double> reward_values;
  std::vector<double> cost_values;
  std::vector<bool> episode_ends;

  // Value estimates of the state following the last stored step; used only
  // when that step did not end an episode.
  double bootstrap_reward_value = 0.0;
  double bootstrap_cost_value = 0.0;

  void push(const Eigen::VectorXd& observation, const Action& action, double log_prob, double reward, double cost,
            double reward_value, double cost_value, bool episode_end);
  std::size_t size() const { return rewards.size(); }
  bool empty() const { return rewards.empty(); }
  void clear();

  /// Throws DimensionError on ragged sequences and ValidityError on positive log-probabilities.
  void validate() const;

  Eigen::MatrixXd observation_matrix() const;
};

enum class Signal { reward, cost };

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> targets;  // advantage + value
};

/// Generalized advantage estimation over the reward or the cost stream,
/// restarting at every episode end. Throws EmptyInputError on an empty buffer.
AdvantageEstimate gae(const RolloutBuffer& buffer, double gamma, double lambda, Signal signal);

/// Discounted cost-to-go from each step to the end of its episode,
/// bootstrapped with the stored cost value when the buffer ends mid-episode.
std::vector<double> discounted_cost_to_go(const RolloutBuffer& buffer, double gamma);

}  // namespace crosstwin::rl
