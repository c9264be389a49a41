#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "crosstwin/rl/adam.hpp"
#include "crosstwin/rl/cvar.hpp"
#include "crosstwin/rl/environment.hpp"
#include "crosstwin/rl/objective.hpp"
#include "crosstwin/rl/policy.hpp"
#include "crosstwin/rl/rollout.hpp"

namespace crosstwin::rl {

struct TrainerConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double lr_policy = 3e-4;
  double lr_reward_value = 3e-4;
  double lr_cost_value = 3e-4;
  std::size_t minibatch_size = 256;
  std::size_t rollout_steps = 2048;
  std::size_t epochs = 4;
  double cost_threshold = std::numeric_limits<double>::infinity();
  std::size_t total_steps = 300000;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  bool shuffle = true;
  bool normalize_advantages = true;

  double cvar_worst_fraction = 0.05;
  double cvar_step = 2e-3;
  int cvar_iterations = 500;
  // Number of most recent rollout batches pooled into the CVaR sample set.
  std::size_t cvar_window_batches = 1;

  // Return the latest policy whose rollout batch met the constraint instead
  // of the final iterate (falls back to the final iterate if none did).
  bool keep_last_feasible = true;
  std::vector<std::size_t> trunk_widths{128, 128};
  std::vector<std::size_t> value_widths{128, 128};

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const TrainerConfig&) const = default;
};

/// 0.5 * mean squared error regression head mapping observations to a scalar.
class ValueHead {
 public:
  ValueHead() = default;
  ValueHead(std::size_t observation_size, const std::vector<std::size_t>& widths);

  void initialize(std::mt19937_64& rng);
  double value(const Eigen::VectorXd& observation) const;
  Eigen::VectorXd values(const Eigen::MatrixXd& observations) const;

  Mlp& network() { return net_; }
  const Mlp& network() const { return net_; }

 private:
  Mlp net_;
};

struct PolicyLoss {
  double loss = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 1.0;
  double entropy = 0.0;
  LayerList gradient;
};

/// Negated clipped surrogate (to be minimized) plus entropy bonus. For the
/// cost branch the surrogate is taken on the negated cost advantage so that a
/// descent step lowers the probability of costly actions. With
/// `schedule_only` the ratio, gradient and entropy cover the scheduling
/// branch alone and `old_log_probs` must be schedule log-probabilities too.
PolicyLoss policy_surrogate_loss(const TwoBranchPolicy& policy, const Eigen::MatrixXd& observations,
                                 std::span<const Action> actions, const Eigen::VectorXd& old_log_probs,
                                 const Eigen::VectorXd& advantages, Branch branch, double clip,
                                 double entropy_coef, LogProbTerms terms = LogProbTerms::joint);

/// Factors entering the update for `branch`: the per-slot reward depends on
/// the schedule only, so the reward step leaves the horizon factor out.
LogProbTerms update_terms(Branch branch);

struct ValueLoss {
  double loss = 0.0;
  LayerList gradient;
};

ValueLoss value_regression_loss(const ValueHead& head, const Eigen::MatrixXd& observations,
                                const Eigen::VectorXd& targets);

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double reward_value_loss = 0.0;
  double cost_value_loss = 0.0;
  double clip_fraction = 0.0;
  double entropy = 0.0;
};

/// Policy, both value heads and their optimizers.
class PpoLearner {
 public:
  PpoLearner(const PolicyShape& shape, const TrainerConfig& config, std::uint64_t seed);

  SampledAction act(const Eigen::VectorXd& observation);
  double reward_value(const Eigen::VectorXd& observation) const { return reward_head_.value(observation); }
  double cost_value(const Eigen::VectorXd& observation) const { return cost_head_.value(observation); }

  /// One CRPO policy update from a complete rollout. Throws TrainingError on
  /// non-finite losses or gradients.
  UpdateDiagnostics update(const RolloutBuffer& buffer, Branch branch);

  TwoBranchPolicy& policy() { return policy_; }
  const TwoBranchPolicy& policy() const { return policy_; }
  ValueHead& reward_head() { return reward_head_; }
  ValueHead& cost_head() { return cost_head_; }
  const ValueHead& reward_head() const { return reward_head_; }
  const ValueHead& cost_head() const { return cost_head_; }

 private:
  TrainerConfig config_;
  std::mt19937_64 rng_;
  TwoBranchPolicy policy_;
  ValueHead reward_head_;
  ValueHead cost_head_;
  Adam policy_opt_;
  Adam reward_opt_;
  Adam cost_opt_;
};

struct UpdateRecord {
  std::size_t update = 0;
  std::size_t steps = 0;  // environment steps consumed so far
  double cvar = 0.0;
  double var_threshold = 0.0;
  double bound = 0.0;
  Branch branch = Branch::maximize_reward;
  double batch_packet_rate = 0.0;
  double batch_error = 0.0;
  UpdateDiagnostics diagnostics;
};

struct EpisodeRecord {
  std::size_t episode = 0;
  double avg_packet_rate = 0.0;  // packets per second
  double avg_error = 0.0;
  double cvar = 0.0;             // CVaR of the batch that closed the episode
  Branch branch = Branch::maximize_reward;
};

struct TrainingResult {
  // The returned iterate; see TrainerConfig::keep_last_feasible.
  TwoBranchPolicy policy;
  ValueHead reward_head;
  ValueHead cost_head;
  // Update whose batch the returned policy collected (absent: final iterate).
  std::optional<std::size_t> selected_update;
  std::vector<EpisodeRecord> episodes;
  std::vector<UpdateRecord> updates;
};

using UpdateCallback = std::function<void(const UpdateRecord&)>;

/// C-PPO: rollout collection, CVaR threshold refinement, GAE and a
/// CRPO-switched policy update per batch, until `total_steps` environment steps.
TrainingResult train(const EnvironmentFactory& factory, const TrainerConfig& config, std::uint64_t seed,
                     const UpdateCallback& on_update = {});

/// Deterministic 64-bit mixing used to derive per-episode seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace crosstwin::rl
