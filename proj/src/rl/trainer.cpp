#include "crosstwin/rl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

void TrainerConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("trainer." + field + ": " + why);
  };
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma", "must lie in (0, 1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda", "must lie in [0, 1]");
  if (!(clip > 0.0)) fail("clip", "must be positive");
  if (!(lr_policy > 0.0)) fail("lr_policy", "must be positive");
  if (!(lr_reward_value > 0.0)) fail("lr_reward_value", "must be positive");
  if (!(lr_cost_value > 0.0)) fail("lr_cost_value", "must be positive");
  if (minibatch_size == 0) fail("minibatch_size", "must be positive");
  if (rollout_steps == 0) fail("rollout_steps", "must be positive");
  if (epochs == 0) fail("epochs", "must be positive");
  if (!(cost_threshold > 0.0)) fail("cost_threshold", "must be positive");
  if (total_steps == 0) fail("total_steps", "must be positive");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef", "must be non-negative");
  if (!(max_grad_norm > 0.0)) fail("max_grad_norm", "must be positive");
  if (!(cvar_worst_fraction > 0.0 && cvar_worst_fraction < 1.0)) fail("cvar_worst_fraction", "must lie in (0, 1)");
  if (!(cvar_step > 0.0)) fail("cvar_step", "must be positive");
  if (cvar_iterations < 1) fail("cvar_iterations", "must be at least 1");
  if (cvar_window_batches == 0) fail("cvar_window_batches", "must be at least 1");
  for (std::size_t w : trunk_widths) {
    if (w == 0) fail("trunk_widths", "layer widths must be positive");
  }
  if (value_widths.empty()) fail("value_widths", "needs at least one hidden layer");
  for (std::size_t w : value_widths) {
    if (w == 0) fail("value_widths", "layer widths must be positive");
  }
}

ValueHead::ValueHead(std::size_t observation_size, const std::vector<std::size_t>& widths) {
  std::vector<std::size_t> sizes{observation_size};
  sizes.insert(sizes.end(), widths.begin(), widths.end());
  sizes.push_back(1);
  net_ = Mlp(sizes, false);
}

void ValueHead::initialize(std::mt19937_64& rng) { net_.initialize(rng, std::sqrt(2.0), 1.0); }

double ValueHead::value(const Eigen::VectorXd& observation) const { return net_.forward(observation)(0, 0); }

Eigen::VectorXd ValueHead::values(const Eigen::MatrixXd& observations) const {
  return net_.forward(observations).row(0).transpose();
}

PolicyLoss policy_surrogate_loss(const TwoBranchPolicy& policy, const Eigen::MatrixXd& observations,
                                 std::span<const Action> actions, const Eigen::VectorXd& old_log_probs,
                                 const Eigen::VectorXd& advantages, Branch branch, double clip,
                                 double entropy_coef, LogProbTerms terms) {
  const auto batch = observations.cols();
  if (static_cast<std::size_t>(batch) != actions.size() || old_log_probs.size() != batch ||
      advantages.size() != batch) {
    throw DimensionError("surrogate batch components have different lengths");
  }
  const auto& shape = policy.shape();
  const auto joints = static_cast<Eigen::Index>(shape.joint_count);
  const auto h = static_cast<Eigen::Index>(shape.max_horizon);
  const double inv_b = 1.0 / static_cast<double>(batch);
  const double sign = branch == Branch::maximize_reward ? 1.0 : -1.0;
  const bool with_horizon = terms == LogProbTerms::joint;

  const auto fwd = policy.logits(observations);
  const Eigen::MatrixXd ps = blockwise_softmax(fwd.schedule, 2);
  const Eigen::MatrixXd ph = blockwise_softmax(fwd.horizon, shape.max_horizon);

  Eigen::MatrixXd grad_s = Eigen::MatrixXd::Zero(ps.rows(), batch);
  Eigen::MatrixXd grad_h = Eigen::MatrixXd::Zero(ph.rows(), batch);

  PolicyLoss out;
  double ratio_sum = 0.0;
  std::size_t clipped = 0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const Action& a = actions[static_cast<std::size_t>(b)];
    double lp = 0.0;
    double ent = 0.0;
    for (Eigen::Index i = 0; i < joints; ++i) {
      const auto k = static_cast<std::size_t>(i);
      lp += std::log(ps(2 * i + (a.schedule[k] == 1 ? 0 : 1), b));
      if (with_horizon) lp += std::log(ph(i * h + a.horizon[k] - 1, b));
    }
    const double ratio = std::exp(lp - old_log_probs[b]);
    const double adv = sign * advantages[b];
    out.loss -= inv_b * ppo_clip_objective(ratio, adv, clip);
    ratio_sum += ratio;
    if (std::abs(ratio - 1.0) > clip) ++clipped;

    // dL/dlogp for this sample; log-softmax gradient is onehot - p.
    const double g = -inv_b * ppo_clip_objective_slope(ratio, adv, clip) * ratio;
    for (Eigen::Index i = 0; i < joints; ++i) {
      const auto k = static_cast<std::size_t>(i);
      auto cs = grad_s.col(b).segment(2 * i, 2);
      auto cp = ps.col(b).segment(2 * i, 2);
      cs -= g * cp;
      cs[a.schedule[k] == 1 ? 0 : 1] += g;
      auto hs = grad_h.col(b).segment(i * h, h);
      auto hp = ph.col(b).segment(i * h, h);
      if (with_horizon) {
        hs -= g * hp;
        hs[a.horizon[k] - 1] += g;
      }

      if (entropy_coef > 0.0) {
        // dH/dz_k = -p_k (log p_k + H) per column; the loss carries -coef * mean H.
        auto column_entropy = [&](auto grad_seg, const auto& p_seg) {
          const Eigen::ArrayXd logp = p_seg.array().max(1e-300).log();
          const double hval = -(p_seg.array() * logp).sum();
          grad_seg += (entropy_coef * inv_b * (p_seg.array() * (logp + hval))).matrix();
          return hval;
        };
        ent += column_entropy(cs, cp);
        if (with_horizon) ent += column_entropy(hs, hp);
      }
    }
    if (entropy_coef > 0.0) {
      out.loss -= entropy_coef * inv_b * ent;
      out.entropy += inv_b * ent;
    }
  }
  out.mean_ratio = ratio_sum * inv_b;
  out.clip_fraction = static_cast<double>(clipped) * inv_b;
  out.gradient = policy.backward(fwd, grad_s, grad_h);
  return out;
}

ValueLoss value_regression_loss(const ValueHead& head, const Eigen::MatrixXd& observations,
                                const Eigen::VectorXd& targets) {
  if (observations.cols() != targets.size()) throw DimensionError("value batch and targets differ in length");
  Mlp::Cache cache;
  const Eigen::MatrixXd pred = head.network().forward(observations, &cache);
  const double inv_b = 1.0 / static_cast<double>(targets.size());
  const Eigen::RowVectorXd diff = pred.row(0) - targets.transpose();
  ValueLoss out;
  out.loss = 0.5 * inv_b * diff.squaredNorm();
  out.gradient = head.network().zero_gradients();
  head.network().backward(cache, inv_b * diff, out.gradient);
  return out;
}

LogProbTerms update_terms(Branch branch) {
  return branch == Branch::maximize_reward ? LogProbTerms::schedule_only : LogProbTerms::joint;
}

namespace {

void clip_gradient(LayerList& grads, double max_norm) {
  const double norm = std::sqrt(squared_norm(grads));
  if (norm > max_norm) scale(grads, max_norm / (norm + 1e-12));
}

void require_finite(double loss, const LayerList& grads, const char* what) {
  if (!std::isfinite(loss) || !all_finite(grads)) {
    throw TrainingError(std::string("non-finite ") + what + " loss or gradient; aborting update");
  }
}

}  // namespace

PpoLearner::PpoLearner(const PolicyShape& shape, const TrainerConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
  config_.validate();
  PolicyShape s = shape;
  s.trunk_widths = config.trunk_widths;
  policy_ = TwoBranchPolicy(s);
  policy_.initialize(rng_);
  reward_head_ = ValueHead(shape.observation_size, config.value_widths);
  reward_head_.initialize(rng_);
  cost_head_ = ValueHead(shape.observation_size, config.value_widths);
  cost_head_.initialize(rng_);
  policy_opt_ = Adam(policy_.parameters(), {config.lr_policy});
  reward_opt_ = Adam(reward_head_.network().layers(), {config.lr_reward_value});
  cost_opt_ = Adam(cost_head_.network().layers(), {config.lr_cost_value});
}

SampledAction PpoLearner::act(const Eigen::VectorXd& observation) {
  return sample_action(policy_.forward(observation), rng_);
}

UpdateDiagnostics PpoLearner::update(const RolloutBuffer& buffer, Branch branch) {
  buffer.validate();
  const std::size_t n = buffer.size();
  const auto reward_est = gae(buffer, config_.gamma, config_.gae_lambda, Signal::reward);
  const auto cost_est = gae(buffer, config_.gamma, config_.gae_lambda, Signal::cost);

  const auto& chosen = branch == Branch::maximize_reward ? reward_est.advantages : cost_est.advantages;
  Eigen::VectorXd adv = Eigen::Map<const Eigen::VectorXd>(chosen.data(), static_cast<Eigen::Index>(n));
  if (config_.normalize_advantages && n > 1) {
    const double mean = adv.mean();
    const double sd = std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(n - 1));
    adv = (adv.array() - mean) / (sd + 1e-8);
  }
  const Eigen::MatrixXd obs = buffer.observation_matrix();
  // The parameters still equal the behaviour policy here, so the partial
  // log-probabilities can be recomputed rather than stored.
  const LogProbTerms terms = update_terms(branch);
  const Eigen::VectorXd old_lp =
      terms == LogProbTerms::joint
          ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(buffer.log_probs.data(), static_cast<Eigen::Index>(n)))
          : policy_.log_probs(obs, buffer.actions, terms);
  const Eigen::Map<const Eigen::VectorXd> reward_targets(reward_est.targets.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> cost_targets(cost_est.targets.data(), static_cast<Eigen::Index>(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateDiagnostics diag;
  std::size_t passes = 0;
  const std::size_t mb = std::min(config_.minibatch_size, n);
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    if (config_.shuffle) std::shuffle(order.begin(), order.end(), rng_);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t len = std::min(mb, n - start);
      const auto m = static_cast<Eigen::Index>(len);
      Eigen::MatrixXd obs_b(obs.rows(), m);
      Eigen::VectorXd lp_b(m), adv_b(m), tr_b(m), tc_b(m);
      std::vector<Action> act_b;
      act_b.reserve(len);
      for (std::size_t k = 0; k < len; ++k) {
        const auto src = static_cast<Eigen::Index>(order[start + k]);
        const auto dst = static_cast<Eigen::Index>(k);
        obs_b.col(dst) = obs.col(src);
        lp_b[dst] = old_lp[src];
        adv_b[dst] = adv[src];
        tr_b[dst] = reward_targets[src];
        tc_b[dst] = cost_targets[src];
        act_b.push_back(buffer.actions[order[start + k]]);
      }

      auto pl = policy_surrogate_loss(policy_, obs_b, act_b, lp_b, adv_b, branch, config_.clip, config_.entropy_coef,
                                      terms);
      require_finite(pl.loss, pl.gradient, "policy");
      clip_gradient(pl.gradient, config_.max_grad_norm);
      policy_opt_.step(policy_.parameters(), pl.gradient);

      auto vr = value_regression_loss(reward_head_, obs_b, tr_b);
      require_finite(vr.loss, vr.gradient, "reward value");
      clip_gradient(vr.gradient, config_.max_grad_norm);
      reward_opt_.step(reward_head_.network().layers(), vr.gradient);

      auto vc = value_regression_loss(cost_head_, obs_b, tc_b);
      require_finite(vc.loss, vc.gradient, "cost value");
      clip_gradient(vc.gradient, config_.max_grad_norm);
      cost_opt_.step(cost_head_.network().layers(), vc.gradient);

      diag.policy_loss += pl.loss;
      diag.reward_value_loss += vr.loss;
      diag.cost_value_loss += vc.loss;
      diag.clip_fraction += pl.clip_fraction;
      diag.entropy += pl.entropy;
      ++passes;
    }
  }
  const double inv = 1.0 / static_cast<double>(passes);
  diag.policy_loss *= inv;
  diag.reward_value_loss *= inv;
  diag.cost_value_loss *= inv;
  diag.clip_fraction *= inv;
  diag.entropy *= inv;
  return diag;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrainingResult train(const EnvironmentFactory& factory, const TrainerConfig& config, std::uint64_t seed,
                     const UpdateCallback& on_update) {
  config.validate();
  auto env = factory();
  const PolicyShape shape{env->observation_size(), env->joint_count(), env->max_horizon(), config.trunk_widths};
  PpoLearner learner(shape, config, mix_seed(seed, 0xA11CE));

  CVaRTracker tracker{0.0, config.cvar_worst_fraction, config.cvar_step, config.cvar_iterations};
  std::deque<std::vector<double>> pool;
  const double bound = constraint_bound(config.cost_threshold, config.gamma);
  const double slot_s = env->slot_seconds();

  TrainingResult result;
  std::uint64_t episode_seq = 0;
  Eigen::VectorXd obs = env->reset(mix_seed(seed, episode_seq));

  struct Running {
    double packets = 0.0;
    double cost = 0.0;
    std::size_t steps = 0;
  } episode;
  std::vector<EpisodeRecord> closed;

  RolloutBuffer buffer;
  std::size_t steps = 0;
  std::size_t update = 0;
  while (steps < config.total_steps) {
    buffer.clear();
    closed.clear();
    const std::size_t n = std::min(config.rollout_steps, config.total_steps - steps);
    double batch_packets = 0.0;
    double batch_cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto sampled = learner.act(obs);
      const double vr = learner.reward_value(obs);
      const double vc = learner.cost_value(obs);
      const Transition tr = env->step(sampled.action);
      buffer.push(obs, sampled.action, sampled.log_prob, tr.reward, tr.cost, vr, vc, tr.done);
      episode.packets += tr.packets;
      episode.cost += tr.cost;
      ++episode.steps;
      batch_packets += tr.packets;
      batch_cost += tr.cost;
      obs = tr.observation;
      if (tr.done) {
        EpisodeRecord rec;
        rec.episode = result.episodes.size() + closed.size();
        rec.avg_packet_rate = episode.packets / (static_cast<double>(episode.steps) * slot_s);
        rec.avg_error = episode.cost / static_cast<double>(episode.steps);
        closed.push_back(rec);
        episode = {};
        obs = env->reset(mix_seed(seed, ++episode_seq));
      }
    }
    steps += n;
    if (!buffer.episode_ends.back()) {
      buffer.bootstrap_reward_value = learner.reward_value(obs);
      buffer.bootstrap_cost_value = learner.cost_value(obs);
    }

    pool.push_back(discounted_cost_to_go(buffer, config.gamma));
    while (pool.size() > config.cvar_window_batches) pool.pop_front();
    std::vector<double> samples;
    for (const auto& batch : pool) samples.insert(samples.end(), batch.begin(), batch.end());
    const double v = cvar_update(tracker, samples);
    const double cvar = cvar_estimate(samples, v, config.cvar_worst_fraction);
    const Branch branch = crpo_select(cvar, config.cost_threshold, config.gamma);

    UpdateRecord rec;
    rec.update = update++;
    rec.steps = steps;
    rec.cvar = cvar;
    rec.var_threshold = v;
    rec.bound = bound;
    rec.branch = branch;
    rec.batch_packet_rate = batch_packets / (static_cast<double>(n) * slot_s);
    rec.batch_error = batch_cost / static_cast<double>(n);
    if (config.keep_last_feasible && branch == Branch::maximize_reward) {
      result.policy = learner.policy();
      result.reward_head = learner.reward_head();
      result.cost_head = learner.cost_head();
      result.selected_update = rec.update;
    }
    rec.diagnostics = learner.update(buffer, branch);
    result.updates.push_back(rec);
    for (auto& ep : closed) {
      ep.cvar = cvar;
      ep.branch = branch;
      result.episodes.push_back(ep);
    }
    if (on_update) on_update(rec);
  }

  if (!result.selected_update) {
    result.policy = learner.policy();
    result.reward_head = learner.reward_head();
    result.cost_head = learner.cost_head();
  }
  return result;
}

}  // namespace crosstwin::rl
