#include "crosstwin/rl/policy.hpp"

#include <cmath>
#include <numbers>

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

TwoBranchPolicy::TwoBranchPolicy(PolicyShape shape) : shape_(std::move(shape)) {
  if (shape_.observation_size == 0 || shape_.joint_count == 0 || shape_.max_horizon == 0) {
    throw DimensionError("policy dimensions must be positive");
  }
  std::size_t in = shape_.observation_size;
  for (std::size_t width : shape_.trunk_widths) {
    layers_.push_back({Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(in)),
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width))});
    in = width;
  }
  const auto features = static_cast<Eigen::Index>(in);
  const auto sched = static_cast<Eigen::Index>(2 * shape_.joint_count);
  const auto horizon = static_cast<Eigen::Index>(shape_.max_horizon * shape_.joint_count);
  layers_.push_back({Eigen::MatrixXd::Zero(sched, features), Eigen::VectorXd::Zero(sched)});
  layers_.push_back({Eigen::MatrixXd::Zero(horizon, features), Eigen::VectorXd::Zero(horizon)});
}

void TwoBranchPolicy::initialize(std::mt19937_64& rng) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    auto& layer = layers_[k];
    const double gain = k < trunk_layers() ? std::numbers::sqrt2 : 0.01;
    layer.weight = orthogonal_matrix(static_cast<std::size_t>(layer.weight.rows()),
                                     static_cast<std::size_t>(layer.weight.cols()), gain, rng);
    layer.bias.setZero();
  }
}

std::size_t TwoBranchPolicy::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

Eigen::MatrixXd blockwise_softmax(const Eigen::MatrixXd& logits, std::size_t block) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  const auto b = static_cast<Eigen::Index>(block);
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    for (Eigen::Index r = 0; r < logits.rows(); r += b) {
      auto seg = logits.col(c).segment(r, b);
      const double m = seg.maxCoeff();
      Eigen::VectorXd e = (seg.array() - m).exp();
      out.col(c).segment(r, b) = e / e.sum();
    }
  }
  return out;
}

TwoBranchPolicy::Logits TwoBranchPolicy::logits(const Eigen::MatrixXd& observations) const {
  if (static_cast<std::size_t>(observations.rows()) != shape_.observation_size) {
    throw DimensionError("observation has " + std::to_string(observations.rows()) + " entries, policy expects " +
                         std::to_string(shape_.observation_size));
  }
  Logits out;
  std::span<const DenseLayer> all(layers_);
  out.features = forward_layers(all.first(trunk_layers()), observations, true, &out.trunk_cache);
  const auto& sched = layers_[trunk_layers()];
  const auto& hor = layers_[trunk_layers() + 1];
  out.schedule = sched.weight * out.features;
  out.schedule.colwise() += sched.bias;
  out.horizon = hor.weight * out.features;
  out.horizon.colwise() += hor.bias;
  return out;
}

LayerList TwoBranchPolicy::backward(const Logits& fwd, const Eigen::MatrixXd& grad_schedule,
                                    const Eigen::MatrixXd& grad_horizon) const {
  LayerList grads;
  grads.reserve(layers_.size());
  for (const auto& l : layers_) grads.push_back(DenseLayer::zeros_like(l));

  const std::size_t s = trunk_layers();
  grads[s].weight.noalias() += grad_schedule * fwd.features.transpose();
  grads[s].bias += grad_schedule.rowwise().sum();
  grads[s + 1].weight.noalias() += grad_horizon * fwd.features.transpose();
  grads[s + 1].bias += grad_horizon.rowwise().sum();

  Eigen::MatrixXd grad_features = layers_[s].weight.transpose() * grad_schedule;
  grad_features.noalias() += layers_[s + 1].weight.transpose() * grad_horizon;
  std::span<const DenseLayer> all(layers_);
  std::span<DenseLayer> g(grads);
  backward_layers(all.first(s), fwd.trunk_cache, grad_features, true, g.first(s));
  return grads;
}

BranchDistributions TwoBranchPolicy::forward(const Eigen::VectorXd& observation) const {
  const Logits l = logits(observation);
  const auto joints = static_cast<Eigen::Index>(shape_.joint_count);
  const auto h = static_cast<Eigen::Index>(shape_.max_horizon);
  const Eigen::VectorXd ps = blockwise_softmax(l.schedule, 2).col(0);
  const Eigen::VectorXd ph = blockwise_softmax(l.horizon, shape_.max_horizon).col(0);
  return {ps.reshaped(2, joints), ph.reshaped(h, joints)};
}

Eigen::VectorXd TwoBranchPolicy::log_probs(const Eigen::MatrixXd& observations, std::span<const Action> actions,
                                           LogProbTerms terms) const {
  const Logits l = logits(observations);
  const Eigen::MatrixXd ps = blockwise_softmax(l.schedule, 2);
  const Eigen::MatrixXd ph = blockwise_softmax(l.horizon, shape_.max_horizon);
  const auto h = static_cast<Eigen::Index>(shape_.max_horizon);
  Eigen::VectorXd out(observations.cols());
  for (Eigen::Index b = 0; b < observations.cols(); ++b) {
    const Action& a = actions[static_cast<std::size_t>(b)];
    double lp = 0.0;
    for (std::size_t i = 0; i < shape_.joint_count; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      lp += std::log(ps(2 * ii + (a.schedule[i] == 1 ? 0 : 1), b));
      if (terms == LogProbTerms::joint) lp += std::log(ph(ii * h + a.horizon[i] - 1, b));
    }
    out[b] = lp;
  }
  return out;
}

namespace {

void check_stochastic(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if ((m.col(c).array() < -1e-12).any() || std::abs(m.col(c).sum() - 1.0) > 1e-6) {
      throw ValidityError(std::string(what) + " column " + std::to_string(c) + " is not a distribution");
    }
  }
}

int draw(const Eigen::VectorXd& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) last_positive = static_cast<int>(k);
    acc += p[k];
    if (r < acc && p[k] > 0.0) return static_cast<int>(k);
  }
  return last_positive;
}

}  // namespace

double action_log_prob(const BranchDistributions& dist, const Action& action) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < dist.schedule.cols(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    lp += std::log(dist.schedule(action.schedule[k] == 1 ? 0 : 1, i));
    lp += std::log(dist.horizon(action.horizon[k] - 1, i));
  }
  return lp;
}

SampledAction sample_action(const BranchDistributions& dist, std::mt19937_64& rng) {
  check_stochastic(dist.schedule, "schedule distribution");
  check_stochastic(dist.horizon, "horizon distribution");
  SampledAction out;
  const auto joints = static_cast<std::size_t>(dist.schedule.cols());
  out.action.schedule.resize(joints);
  out.action.horizon.resize(joints);
  for (std::size_t i = 0; i < joints; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.action.schedule[i] = draw(dist.schedule.col(c), rng) == 0 ? 1 : 0;
    out.action.horizon[i] = draw(dist.horizon.col(c), rng) + 1;
  }
  out.log_prob = action_log_prob(dist, out.action);
  return out;
}

SampledAction greedy_action(const BranchDistributions& dist) {
  SampledAction out;
  const auto joints = static_cast<std::size_t>(dist.schedule.cols());
  out.action.schedule.resize(joints);
  out.action.horizon.resize(joints);
  for (std::size_t i = 0; i < joints; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    Eigen::Index best = 0;
    dist.schedule.col(c).maxCoeff(&best);
    out.action.schedule[i] = best == 0 ? 1 : 0;
    dist.horizon.col(c).maxCoeff(&best);
    out.action.horizon[i] = static_cast<int>(best) + 1;
  }
  out.log_prob = action_log_prob(dist, out.action);
  return out;
}

double entropy(const BranchDistributions& dist) {
  auto h = [](const Eigen::MatrixXd& p) {
    return -(p.array() * p.array().max(1e-300).log()).sum();
  };
  return h(dist.schedule) + h(dist.horizon);
}

}  // namespace crosstwin::rl
