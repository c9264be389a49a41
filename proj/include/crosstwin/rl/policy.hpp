#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "crosstwin/rl/environment.hpp"
#include "crosstwin/rl/mlp.hpp"

namespace crosstwin::rl {

struct PolicyShape {
  std::size_t observation_size = 0;
  std::size_t joint_count = 0;
  std::size_t max_horizon = 1;
  std::vector<std::size_t> trunk_widths{128, 128};
};

/// Column-stochastic action distributions. schedule is 2 x I with row 0 =
/// Pr{transmit} and row 1 = Pr{skip}; horizon is H x I with row h-1 = Pr{z = h}.
struct BranchDistributions {
  Eigen::MatrixXd schedule;
  Eigen::MatrixXd horizon;
};

/// Which factors of the joint action probability to include.
enum class LogProbTerms { joint, schedule_only };

struct SampledAction {
  Action action;
  double log_prob = 0.0;
};

/// Shared tanh trunk feeding a scheduling head (2*I logits) and a horizon
/// head (H*I logits). All parameters live in one layer list: the trunk
/// layers first, then the scheduling head, then the horizon head.
class TwoBranchPolicy {
 public:
  TwoBranchPolicy() = default;
  explicit TwoBranchPolicy(PolicyShape shape);

  /// Orthogonal trunk (gain sqrt 2) and near-zero heads (gain 0.01).
  void initialize(std::mt19937_64& rng);

  const PolicyShape& shape() const { return shape_; }
  LayerList& parameters() { return layers_; }
  const LayerList& parameters() const { return layers_; }
  std::size_t parameter_count() const;

  BranchDistributions forward(const Eigen::VectorXd& observation) const;

  /// Log-probabilities of `actions` under the policy for a batch of observations
  /// (observation_size x B).
  Eigen::VectorXd log_probs(const Eigen::MatrixXd& observations, std::span<const Action> actions,
                            LogProbTerms terms = LogProbTerms::joint) const;

  struct Logits {
    Eigen::MatrixXd schedule;  // 2I x B
    Eigen::MatrixXd horizon;   // HI x B
    ForwardCache trunk_cache;
    Eigen::MatrixXd features;
  };
  Logits logits(const Eigen::MatrixXd& observations) const;

  /// Backpropagates logit gradients into a zero-initialized gradient list.
  LayerList backward(const Logits& forward, const Eigen::MatrixXd& grad_schedule,
                     const Eigen::MatrixXd& grad_horizon) const;

 private:
  std::size_t trunk_layers() const { return layers_.size() - 2; }

  PolicyShape shape_;
  LayerList layers_;
};

/// Softmax over each contiguous block of `block` rows, column by column.
Eigen::MatrixXd blockwise_softmax(const Eigen::MatrixXd& logits, std::size_t block);

/// Per-joint categorical draws. Throws ValidityError if a column is not a
/// distribution within 1e-6.
SampledAction sample_action(const BranchDistributions& dist, std::mt19937_64& rng);

/// Mode of each column (ties go to the lower index, i.e. transmit / shorter horizon).
SampledAction greedy_action(const BranchDistributions& dist);

double action_log_prob(const BranchDistributions& dist, const Action& action);

/// Summed entropy of every column of both branches.
double entropy(const BranchDistributions& dist);

}  // namespace crosstwin::rl
