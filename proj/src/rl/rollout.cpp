#include "crosstwin/rl/rollout.hpp"

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

void RolloutBuffer::push(const Eigen::VectorXd& observation, const Action& action, double log_prob, double reward,
                         double cost, double reward_value, double cost_value, bool episode_end) {
  observations.push_back(observation);
  actions.push_back(action);
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  costs.push_back(cost);
  reward_values.push_back(reward_value);
  cost_values.push_back(cost_value);
  episode_ends.push_back(episode_end);
}

void RolloutBuffer::clear() {
  observations.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  costs.clear();
  reward_values.clear();
  cost_values.clear();
  episode_ends.clear();
  bootstrap_reward_value = 0.0;
  bootstrap_cost_value = 0.0;
}

void RolloutBuffer::validate() const {
  const std::size_t n = rewards.size();
  if (observations.size() != n || actions.size() != n || log_probs.size() != n || costs.size() != n ||
      reward_values.size() != n || cost_values.size() != n || episode_ends.size() != n) {
    throw DimensionError("rollout buffer sequences have different lengths");
  }
  for (double lp : log_probs) {
    if (!(lp <= 0.0)) throw ValidityError("rollout buffer holds a log-probability above zero");
  }
}

Eigen::MatrixXd RolloutBuffer::observation_matrix() const {
  if (observations.empty()) return {};
  Eigen::MatrixXd m(observations.front().size(), static_cast<Eigen::Index>(observations.size()));
  for (std::size_t k = 0; k < observations.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = observations[k];
  return m;
}

AdvantageEstimate gae(const RolloutBuffer& buffer, double gamma, double lambda, Signal signal) {
  if (buffer.empty()) throw EmptyInputError("GAE needs at least one step");
  const bool reward = signal == Signal::reward;
  const auto& values = reward ? buffer.reward_values : buffer.cost_values;
  const auto& signals = reward ? buffer.rewards : buffer.costs;
  const double bootstrap = reward ? buffer.bootstrap_reward_value : buffer.bootstrap_cost_value;

  const std::size_t n = buffer.size();
  AdvantageEstimate out;
  out.advantages.assign(n, 0.0);
  out.targets.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double live = buffer.episode_ends[t] ? 0.0 : 1.0;
    const double next_value = (t + 1 == n) ? bootstrap : values[t + 1];
    const double delta = signals[t] + gamma * next_value * live - values[t];
    running = delta + gamma * lambda * live * running;
    out.advantages[t] = running;
    out.targets[t] = running + values[t];
  }
  return out;
}

std::vector<double> discounted_cost_to_go(const RolloutBuffer& buffer, double gamma) {
  const std::size_t n = buffer.size();
  std::vector<double> out(n, 0.0);
  double running = buffer.bootstrap_cost_value;
  for (std::size_t t = n; t-- > 0;) {
    if (buffer.episode_ends[t]) running = 0.0;
    running = buffer.costs[t] + gamma * running;
    out[t] = running;
  }
  return out;
}

}  // namespace crosstwin::rl
