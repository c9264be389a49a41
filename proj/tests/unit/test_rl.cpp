#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crosstwin/errors.hpp"
#include "crosstwin/kinematics/chains.hpp"
#include "crosstwin/rl/checkpoint.hpp"
#include "crosstwin/rl/cvar.hpp"
#include "crosstwin/rl/evaluate.hpp"
#include "crosstwin/rl/objective.hpp"
#include "crosstwin/rl/policy.hpp"
#include "crosstwin/rl/rollout.hpp"
#include "crosstwin/rl/trainer.hpp"
#include "crosstwin/sim/baseline.hpp"
#include "crosstwin/sim/twin_environment.hpp"

using namespace crosstwin;
using namespace crosstwin::rl;

namespace {

// One state, one joint; transmitting pays 1 (or costs 1).
class BanditEnv final : public Environment {
 public:
  BanditEnv(bool as_cost, std::size_t length) : as_cost_(as_cost), length_(length) {}
  std::size_t observation_size() const override { return 1; }
  std::size_t joint_count() const override { return 1; }
  std::size_t max_horizon() const override { return 2; }
  double slot_seconds() const override { return 1e-3; }
  Eigen::VectorXd reset(std::uint64_t) override {
    t_ = 0;
    return Eigen::VectorXd::Ones(1);
  }
  Transition step(const Action& a) override {
    Transition tr;
    tr.observation = Eigen::VectorXd::Ones(1);
    const double hit = a.schedule[0] == 1 ? 1.0 : 0.0;
    (as_cost_ ? tr.cost : tr.reward) = hit;
    tr.packets = a.schedule[0];
    tr.done = ++t_ >= length_;
    return tr;
  }

 private:
  bool as_cost_;
  std::size_t length_;
  std::size_t t_ = 0;
};

EnvironmentFactory bandit(bool as_cost = false, std::size_t length = 10) {
  return [=] { return std::make_unique<BanditEnv>(as_cost, length); };
}

TrainerConfig toy_trainer() {
  TrainerConfig c;
  c.trunk_widths = {8};
  c.value_widths = {8};
  c.rollout_steps = 200;
  c.minibatch_size = 50;
  c.total_steps = 2000;
  return c;
}

double transmit_probability(const TwoBranchPolicy& p) { return p.forward(Eigen::VectorXd::Ones(1)).schedule(0, 0); }

// Central differences of `loss` over every parameter of `layers`.
template <class Loss>
Eigen::VectorXd numeric_gradient(LayerList& layers, Loss loss) {
  Eigen::VectorXd theta = flatten(layers);
  Eigen::VectorXd g(theta.size());
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double keep = theta[k];
    theta[k] = keep + h;
    unflatten(theta, layers);
    const double up = loss();
    theta[k] = keep - h;
    unflatten(theta, layers);
    const double down = loss();
    theta[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  unflatten(theta, layers);
  return g;
}

void check_close(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  REQUIRE(analytic.size() == numeric.size());
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const double scale = std::max({std::abs(analytic[k]), std::abs(numeric[k]), 1e-6});
    CHECK(std::abs(analytic[k] - numeric[k]) / scale < 1e-4);
  }
}

// Discounted return oracle written out as a plain double loop.
double brute_return(const std::vector<double>& r, std::size_t from, std::size_t end, double gamma, double tail) {
  double total = 0.0, w = 1.0;
  for (std::size_t k = from; k < end; ++k) {
    total += w * r[k];
    w *= gamma;
  }
  return total + w * tail;
}

}  // namespace

TEST_CASE("policy heads") {
  PolicyShape shape{5, 3, 4, {16, 16}};
  TwoBranchPolicy policy(shape);
  std::mt19937_64 rng(1);
  policy.initialize(rng);
  const auto count = policy.parameter_count();
  CHECK(count == flatten(policy.parameters()).size());

  SUBCASE("zero parameters give uniform columns") {
    unflatten(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count)), policy.parameters());
    const auto d = policy.forward(Eigen::VectorXd::Random(5));
    CHECK(d.schedule.isConstant(0.5, 1e-15));
    CHECK(d.horizon.isConstant(0.25, 1e-15));
  }
  SUBCASE("columns are distributions") {
    for (int k = 0; k < 20; ++k) {
      const auto d = policy.forward(Eigen::VectorXd::Random(5) * 10);
      CHECK(d.schedule.rows() == 2);
      CHECK(d.horizon.rows() == 4);
      for (Eigen::Index c = 0; c < 3; ++c) {
        CHECK(std::abs(d.schedule.col(c).sum() - 1.0) < 1e-9);
        CHECK(std::abs(d.horizon.col(c).sum() - 1.0) < 1e-9);
        CHECK(d.schedule.col(c).minCoeff() > 0.0);
        CHECK(d.horizon.col(c).minCoeff() > 0.0);
      }
    }
  }
  CHECK_THROWS_AS(policy.forward(Eigen::VectorXd::Zero(4)), DimensionError);
  CHECK(policy.parameter_count() == count);
}

TEST_CASE("blockwise_softmax shift invariance") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  Eigen::MatrixXd logits(6, 4);
  for (Eigen::Index k = 0; k < logits.size(); ++k) logits.data()[k] = n(rng);
  const Eigen::MatrixXd p = blockwise_softmax(logits, 3);
  Eigen::MatrixXd shifted = logits;
  shifted.block(0, 2, 3, 1).array() += 123.4;
  shifted.block(3, 2, 3, 1).array() -= 55.0;
  CHECK((blockwise_softmax(shifted, 3) - p).cwiseAbs().maxCoeff() < 1e-9);
  for (Eigen::Index c = 0; c < 4; ++c) {
    CHECK(std::abs(p.block(0, c, 3, 1).sum() - 1) < 1e-12);
    CHECK(std::abs(p.block(3, c, 3, 1).sum() - 1) < 1e-12);
  }
}

TEST_CASE("sample_action") {
  std::mt19937_64 rng(11);
  BranchDistributions d;
  d.schedule.resize(2, 2);
  d.schedule << 1, 0.3, 0, 0.7;
  d.horizon = Eigen::MatrixXd::Constant(4, 2, 0.25);
  std::array<int, 4> counts{};
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const auto s = sample_action(d, rng);
    REQUIRE(s.action.schedule[0] == 1);
    ++counts[static_cast<std::size_t>(s.action.horizon[1] - 1)];
    const double expect = std::log(d.schedule(s.action.schedule[0] ? 0 : 1, 0)) +
                          std::log(d.schedule(s.action.schedule[1] ? 0 : 1, 1)) + 2 * std::log(0.25);
    REQUIRE(std::abs(s.log_prob - expect) < 1e-12);
    REQUIRE(std::abs(action_log_prob(d, s.action) - expect) < 1e-12);
  }
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) < 0.01);

  const auto g = greedy_action(d);
  CHECK(g.action.schedule == std::vector<int>{1, 0});
  CHECK(g.action.horizon == std::vector<int>{1, 1});

  BranchDistributions bad = d;
  bad.schedule(0, 1) = 0.5;
  CHECK_THROWS_AS(sample_action(bad, rng), ValidityError);
  bad = d;
  bad.horizon(0, 0) = 0.26;
  CHECK_THROWS_AS(sample_action(bad, rng), ValidityError);
  bad = d;
  bad.horizon(0, 0) = 0.25 + 5e-7;  // inside tolerance
  CHECK_NOTHROW(sample_action(bad, rng));
}

TEST_CASE("entropy") {
  BranchDistributions d;
  d.schedule = Eigen::MatrixXd::Constant(2, 3, 0.5);
  d.horizon = Eigen::MatrixXd::Constant(4, 3, 0.25);
  CHECK(entropy(d) == doctest::Approx(3 * std::log(2.0) + 3 * std::log(4.0)));
}

TEST_CASE("gae examples") {
  RolloutBuffer b;
  const Eigen::VectorXd o = Eigen::VectorXd::Zero(1);
  const Action a{{1}, {1}};
  b.push(o, a, -0.1, 1.0, 0.0, 0.0, 0.0, true);
  for (double g : {0.5, 0.99}) {
    for (double l : {0.0, 0.95, 1.0}) CHECK(gae(b, g, l, Signal::reward).advantages[0] == 1.0);
  }

  SUBCASE("lambda 0 is the one-step TD error") {
    RolloutBuffer c;
    const std::vector<double> r{0.3, -1.0, 2.0, 0.5}, v{0.1, 0.4, -0.2, 0.7};
    for (std::size_t k = 0; k < 4; ++k) c.push(o, a, -0.1, r[k], 0.0, v[k], 0.0, false);
    c.bootstrap_reward_value = 0.9;
    const auto est = gae(c, 0.9, 0.0, Signal::reward);
    for (std::size_t k = 0; k < 4; ++k) {
      const double next = k + 1 < 4 ? v[k + 1] : 0.9;
      CHECK(est.advantages[k] == r[k] + 0.9 * next - v[k]);
      CHECK(est.targets[k] == doctest::Approx(est.advantages[k] + v[k]));
    }
  }
  SUBCASE("hand-computed five-step episode, lambda 1") {
    RolloutBuffer c;
    const std::vector<double> r{1, 0, 2, 0, 1}, v{0.5, 0.5, 0.5, 0.5, 0.5};
    for (std::size_t k = 0; k < 5; ++k) c.push(o, a, -0.1, 0.0, r[k], 0.0, v[k], k == 4);
    const auto est = gae(c, 0.5, 1.0, Signal::cost);
    // Returns by hand: 1 + 0 + 0.5 + 0 + 0.0625 = 1.5625; 1.125; 2.25; 0.5; 1.
    const std::vector<double> ret{1.5625, 1.125, 2.25, 0.5, 1.0};
    for (std::size_t k = 0; k < 5; ++k) CHECK(est.advantages[k] == doctest::Approx(ret[k] - 0.5).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gae(RolloutBuffer{}, 0.9, 0.9, Signal::reward), EmptyInputError);
}

TEST_CASE("gae with lambda 1 matches discounted returns on every episode layout up to six steps") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Eigen::VectorXd o = Eigen::VectorXd::Zero(1);
  const Action a{{0}, {1}};
  for (std::size_t len = 1; len <= 6; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      for (double gamma : {0.0, 0.5, 0.9, 0.99, 1.0}) {
        RolloutBuffer b;
        std::vector<double> r(len), v(len);
        std::vector<bool> ends(len);
        for (std::size_t k = 0; k < len; ++k) {
          r[k] = u(rng);
          v[k] = u(rng);
          ends[k] = (mask >> k) & 1u;
          b.push(o, a, -1.0, r[k], 0.0, v[k], 0.0, ends[k]);
        }
        b.bootstrap_reward_value = u(rng);
        const auto est = gae(b, gamma, 1.0, Signal::reward);
        for (std::size_t t = 0; t < len; ++t) {
          std::size_t end = t;
          while (end < len && !ends[end]) ++end;
          const double tail = end < len ? 0.0 : b.bootstrap_reward_value;
          const std::size_t stop = end < len ? end + 1 : len;
          REQUIRE(std::abs(est.advantages[t] - (brute_return(r, t, stop, gamma, tail) - v[t])) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("discounted_cost_to_go") {
  RolloutBuffer b;
  const Eigen::VectorXd o = Eigen::VectorXd::Zero(1);
  const Action a{{0}, {1}};
  b.push(o, a, -1, 0, 1, 0, 0, false);
  b.push(o, a, -1, 0, 2, 0, 0, true);
  b.push(o, a, -1, 0, 4, 0, 0, false);
  b.bootstrap_cost_value = 8;
  const auto c = discounted_cost_to_go(b, 0.5);
  CHECK(c[0] == 2.0);
  CHECK(c[1] == 2.0);
  CHECK(c[2] == 8.0);
}

TEST_CASE("RolloutBuffer validation") {
  RolloutBuffer b;
  b.push(Eigen::VectorXd::Zero(1), Action{{1}, {1}}, 0.1, 0, 0, 0, 0, true);
  CHECK_THROWS_AS(b.validate(), ValidityError);
  b.clear();
  b.push(Eigen::VectorXd::Zero(1), Action{{1}, {1}}, -0.1, 0, 0, 0, 0, true);
  b.costs.push_back(1.0);
  CHECK_THROWS_AS(b.validate(), DimensionError);
}

TEST_CASE("ppo_clip_objective") {
  CHECK(ppo_clip_objective(1.0, 0.7, 0.2) == 0.7);
  CHECK(ppo_clip_objective(1.0, -3.0, 0.2) == -3.0);
  CHECK(ppo_clip_objective(2.0, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo_clip_objective(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ratio(0.01, 3.0), adv(-5.0, 5.0);
  for (int k = 0; k < 10000; ++k) {
    const double r = ratio(rng), a = adv(rng);
    const double f = ppo_clip_objective(r, a, 0.2);
    // Pessimistic: never above the unclipped term, for either sign of A.
    REQUIRE(f <= r * a);
    REQUIRE(f <= std::clamp(r, 0.8, 1.2) * a);
    if (r >= 0.8 && r <= 1.2) REQUIRE(f == r * a);
  }
}

TEST_CASE("cvar examples") {
  const std::vector<double> same(7, 2.5);
  CHECK(cvar_estimate(same, 2.5, 0.05) == 2.5);
  const std::vector<double> four{1, 2, 3, 4};
  for (double v : {4.0, 5.0, 100.0}) CHECK(cvar_estimate(four, v, 0.3) == v);
  CHECK(empirical_cvar(four, 0.5) == 3.5);
  CHECK(cvar_estimate(four, 2.5, 0.5) == 3.5);
  CHECK_THROWS_AS(cvar_estimate(std::vector<double>{}, 0.0, 0.1), EmptyInputError);

  SUBCASE("update stays put on a constant sample") {
    CVaRTracker t{2.5, 0.05, 2e-3, 500};
    CHECK(cvar_update(t, same) == 2.5);
  }
  SUBCASE("update converges into the VaR interval") {
    CVaRTracker t{0.0, 0.5, 0.01, 500};
    const double v = cvar_update(t, four);
    CHECK(v >= 2.0 - 0.01);
    CHECK(v <= 3.0 + 0.01);
    CHECK(std::abs(cvar_estimate(four, v, 0.5) - 3.5) < 0.05);
  }
  SUBCASE("descends one step at a time from above") {
    CVaRTracker t{10.0, 0.5, 0.01, 1};
    double prev = t.threshold;
    while (prev > 4.0) {
      const double v = cvar_update(t, four);
      REQUIRE(v == doctest::Approx(prev - 0.01));
      prev = v;
    }
  }
  CVaRTracker bad{0.0, 1.0, 1e-3, 10};
  CHECK_THROWS_AS(cvar_update(bad, four), ValidityError);
}

TEST_CASE("crpo_select") {
  CHECK(constraint_bound(0.25, 0.99) == doctest::Approx(25.0));
  CHECK(crpo_select(20.0, 0.25, 0.99) == Branch::maximize_reward);
  CHECK(crpo_select(30.0, 0.25, 0.99) == Branch::minimize_cost);
  CHECK(crpo_select(constraint_bound(0.25, 0.99), 0.25, 0.99) == Branch::maximize_reward);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0), s(0.01, 100.0);
  for (int k = 0; k < 10000; ++k) {
    const double c = u(rng), th = u(rng) * 0.01, scale = s(rng);
    REQUIRE(crpo_select(c, th, 0.99) == crpo_select(c * scale, th * scale, 0.99));
  }
}

TEST_CASE("surrogate and value gradients match finite differences") {
  // Sixteen parameters each: trunk 1->2, scheduling head 2->2, horizon head 2->2.
  PolicyShape shape{1, 1, 2, {2}};
  TwoBranchPolicy policy(shape);
  std::mt19937_64 rng(5);
  policy.initialize(rng);
  std::normal_distribution<double> n(0.0, 0.8);
  for (auto& l : policy.parameters()) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) l.weight.data()[k] = n(rng);
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias[k] = n(rng);
  }
  REQUIRE(policy.parameter_count() == 16);

  const Eigen::Index batch = 6;
  Eigen::MatrixXd obs(1, batch);
  for (Eigen::Index b = 0; b < batch; ++b) obs(0, b) = n(rng);
  std::vector<Action> actions;
  std::uniform_int_distribution<int> bit(0, 1);
  for (Eigen::Index b = 0; b < batch; ++b) actions.push_back({{bit(rng)}, {1 + bit(rng)}});
  Eigen::VectorXd adv(batch);
  for (Eigen::Index b = 0; b < batch; ++b) adv[b] = n(rng);

  for (auto terms : {LogProbTerms::joint, LogProbTerms::schedule_only}) {
    // Old log-probs near the current ones keep every ratio inside the clip
    // range; the last sample sits far outside to exercise the clipped branch.
    Eigen::VectorXd old = policy.log_probs(obs, actions, terms);
    for (Eigen::Index b = 0; b < batch; ++b) old[b] += b + 1 < batch ? 0.05 * n(rng) : 1.0;
    for (auto branch : {Branch::maximize_reward, Branch::minimize_cost}) {
      for (double ent : {0.0, 0.05}) {
        const auto loss = policy_surrogate_loss(policy, obs, actions, old, adv, branch, 0.2, ent, terms);
        const auto numeric = numeric_gradient(policy.parameters(), [&] {
          return policy_surrogate_loss(policy, obs, actions, old, adv, branch, 0.2, ent, terms).loss;
        });
        check_close(flatten(loss.gradient), numeric);
      }
    }
  }

  // Value head with sixteen parameters: 3 -> 3 -> 1.
  ValueHead head(3, {3});
  head.initialize(rng);
  REQUIRE(head.network().parameter_count() == 16);
  Eigen::MatrixXd vobs(3, batch);
  for (Eigen::Index k = 0; k < vobs.size(); ++k) vobs.data()[k] = n(rng);
  Eigen::VectorXd targets(batch);
  for (Eigen::Index b = 0; b < batch; ++b) targets[b] = n(rng);
  const auto vl = value_regression_loss(head, vobs, targets);
  const auto vnum =
      numeric_gradient(head.network().layers(), [&] { return value_regression_loss(head, vobs, targets).loss; });
  check_close(flatten(vl.gradient), vnum);
}

TEST_CASE("surrogate at ratio one is the mean advantage") {
  PolicyShape shape{1, 1, 2, {4}};
  TwoBranchPolicy policy(shape);
  std::mt19937_64 rng(6);
  policy.initialize(rng);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Ones(1, 3);
  const std::vector<Action> actions{{{1}, {1}}, {{0}, {2}}, {{1}, {2}}};
  Eigen::VectorXd adv(3);
  adv << 0.5, -1.0, 2.0;
  const auto old = policy.log_probs(obs, actions);
  CHECK(policy_surrogate_loss(policy, obs, actions, old, adv, Branch::maximize_reward, 0.2, 0.0).loss ==
        doctest::Approx(-adv.mean()));
  CHECK(policy_surrogate_loss(policy, obs, actions, old, adv, Branch::minimize_cost, 0.2, 0.0).loss ==
        doctest::Approx(adv.mean()));
}

TEST_CASE("one gradient step moves probability the right way") {
  PolicyShape shape{1, 1, 2, {4}};
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Ones(1, 1);
  const std::vector<Action> act{{{1}, {2}}};
  const Eigen::VectorXd adv = Eigen::VectorXd::Constant(1, 1.0);
  for (auto branch : {Branch::maximize_reward, Branch::minimize_cost}) {
    TwoBranchPolicy policy(shape);
    std::mt19937_64 rng(7);
    policy.initialize(rng);
    const double before = std::exp(policy.log_probs(obs, act)[0]);
    const auto loss = policy_surrogate_loss(policy, obs, act, policy.log_probs(obs, act), adv, branch, 0.2, 0.0);
    Eigen::VectorXd theta = flatten(policy.parameters());
    theta -= 0.1 * flatten(loss.gradient);
    unflatten(theta, policy.parameters());
    const double after = std::exp(policy.log_probs(obs, act)[0]);
    if (branch == Branch::maximize_reward) {
      CHECK(after > before);
    } else {
      CHECK(after < before);
    }
  }
}

TEST_CASE("update_terms") {
  CHECK(update_terms(Branch::maximize_reward) == LogProbTerms::schedule_only);
  CHECK(update_terms(Branch::minimize_cost) == LogProbTerms::joint);
}

TEST_CASE("bandit: reward branch finds the better arm") {
  auto cfg = toy_trainer();
  cfg.lr_policy = 1e-2;
  const auto result = train(bandit(), cfg, 1);
  CHECK(transmit_probability(result.policy) > 0.95);
  for (const auto& u : result.updates) CHECK(u.branch == Branch::maximize_reward);
}

TEST_CASE("bandit: cost branch avoids the costly arm") {
  auto cfg = toy_trainer();
  cfg.lr_policy = 1e-2;
  cfg.cost_threshold = 1e-9;
  const auto result = train(bandit(true), cfg, 1);
  CHECK(transmit_probability(result.policy) < 0.05);
  for (const auto& u : result.updates) CHECK(u.branch == Branch::minimize_cost);
}

TEST_CASE("train bookkeeping and determinism") {
  auto cfg = toy_trainer();
  std::size_t calls = 0;
  const auto a = train(bandit(false, 7), cfg, 3, [&](const UpdateRecord&) { ++calls; });
  CHECK(calls == a.updates.size());
  CHECK(a.updates.size() == cfg.total_steps / cfg.rollout_steps);
  CHECK(a.episodes.size() == cfg.total_steps / 7);
  for (std::size_t k = 0; k < a.episodes.size(); ++k) CHECK(a.episodes[k].episode == k);
  const auto b = train(bandit(false, 7), cfg, 3);
  CHECK(flatten(a.policy.parameters()) == flatten(b.policy.parameters()));
  const auto c = train(bandit(false, 7), cfg, 4);
  CHECK(flatten(a.policy.parameters()) != flatten(c.policy.parameters()));
  cfg.rollout_steps = 0;
  CHECK_THROWS_AS(train(bandit(), cfg, 1), ConfigError);
}

TEST_CASE("CRPO log never takes a cost step below the bound") {
  auto cfg = toy_trainer();
  cfg.cost_threshold = 0.02;
  cfg.lr_policy = 3e-3;
  const auto result = train(bandit(true, 10), cfg, 2);
  for (const auto& u : result.updates) {
    CHECK(u.branch == crpo_select(u.cvar, cfg.cost_threshold, cfg.gamma));
  }
}

namespace {

sim::SimConfig twin_config() {
  sim::SimConfig c;
  c.reconstruction_window = 50;
  c.prediction_window = 50;
  c.max_horizon = 10;
  c.episode_length = 250;
  return c;
}

sim::TrajectorySource twin_source() {
  sim::TrajectorySource s;
  s.amplitude = {0.6, 0.5, 0.4};
  s.frequency_hz = {0.25, 0.4, 0.6};
  s.phase = {0, 1, 2};
  s.start_jitter = 5000;
  return s;
}

// Least-squares slope of a series against its index.
template <class Get>
double trend(const std::vector<UpdateRecord>& updates, Get get) {
  const double n = static_cast<double>(updates.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < updates.size(); ++k) {
    const double x = static_cast<double>(k), y = get(updates[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("unconstrained training lowers the packet rate over five seeds") {
  const auto factory = sim::make_twin_factory(twin_config(), kin::planar3_chain(kin::kDefaultPlanarLengths), twin_source());
  auto cfg = toy_trainer();
  cfg.trunk_widths = {32, 32};
  cfg.value_widths = {32, 32};
  cfg.rollout_steps = 400;
  cfg.minibatch_size = 100;
  cfg.total_steps = 8000;
  cfg.lr_policy = 1e-3;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = train(factory, cfg, seed);
    REQUIRE(r.updates.size() == 20);
    CHECK(trend(r.updates, [](const UpdateRecord& u) { return u.batch_packet_rate; }) < 0.0);
  }
}

TEST_CASE("cost-only training does not raise the error over five seeds") {
  // Long horizons make most random choices costly, so there is something to learn.
  auto sc = twin_config();
  sc.max_horizon = 50;
  const auto factory = sim::make_twin_factory(sc, kin::planar3_chain(kin::kDefaultPlanarLengths), twin_source());
  auto cfg = toy_trainer();
  cfg.trunk_widths = {32, 32};
  cfg.value_widths = {32, 32};
  cfg.rollout_steps = 400;
  cfg.minibatch_size = 100;
  cfg.total_steps = 48000;
  cfg.lr_policy = 1e-3;
  cfg.cost_threshold = 1e-9;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = train(factory, cfg, seed);
    for (const auto& u : r.updates) REQUIRE(u.branch == Branch::minimize_cost);
    const double slope = trend(r.updates, [](const UpdateRecord& u) { return u.batch_error; });
    MESSAGE("seed " << seed << " error slope per update " << slope);
    CHECK(slope <= 0.0);
  }
}

TEST_CASE("checkpoint round trip") {
  auto cfg = toy_trainer();
  const auto r = train(bandit(), cfg, 9);
  Checkpoint c{0x1234abcdULL, r.policy, r.reward_head, r.cost_head};
  const auto text = serialize_checkpoint(c);
  const auto back = parse_checkpoint(text);
  CHECK(back.config_hash == c.config_hash);
  CHECK(flatten(back.policy.parameters()) == flatten(c.policy.parameters()));
  CHECK(flatten(back.cost_head.network().layers()) == flatten(c.cost_head.network().layers()));
  CHECK(serialize_checkpoint(back) == text);
  CHECK_THROWS_AS(parse_checkpoint("nonsense"), ValidityError);
  CHECK_THROWS_AS(parse_checkpoint(text.substr(0, text.size() / 2)), ValidityError);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("ccdf") {
  const std::vector<double> s{0.5, 1.0, 1.0, 3.0};
  CHECK(ccdf_at(s, 0.0) == 1.0);
  CHECK(ccdf_at(s, 1.0) == 0.25);
  CHECK(ccdf_at(s, 3.0) == 0.0);
  const auto table = ccdf_table(s);
  REQUIRE(table.size() == 3);
  CHECK(table[1].cost == 1.0);
  CHECK(table[1].exceed_fraction == 0.25);
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> many(500);
  for (auto& x : many) x = e(rng);
  for (double th : {0.1, 0.7, 2.0}) {
    const double le = static_cast<double>(std::count_if(many.begin(), many.end(), [&](double x) { return x <= th; }));
    CHECK(ccdf_at(many, th) == doctest::Approx(1.0 - le / 500.0));
  }
}

TEST_CASE("evaluate") {
  const auto cfg = twin_config();
  const auto chain = kin::planar3_chain(kin::kDefaultPlanarLengths);
  const auto factory = sim::make_twin_factory(cfg, chain, twin_source());
  SUBCASE("all-ones selector matches the baseline packet rate") {
    const ActionSelector ones = [](const Eigen::VectorXd&, std::mt19937_64&) {
      return Action{{1, 1, 1}, {2, 2, 2}};
    };
    const auto r = evaluate(ones, factory, 3, 1, 0.99, 0.5);
    CHECK(r.mean_packet_rate == doctest::Approx(sim::run_baseline(cfg, chain, twin_source(), 1).packet_rate));
    CHECK(r.discounted_costs.size() == 3);
  }
  SUBCASE("repeatable for a fixed seed") {
    PolicyShape shape{21, 3, 10, {16}};
    TwoBranchPolicy policy(shape);
    std::mt19937_64 rng(2);
    policy.initialize(rng);
    for (auto mode : {ActionMode::greedy, ActionMode::sample}) {
      const auto sel = policy_selector(policy, mode);
      const auto a = evaluate(sel, factory, 4, 17, 0.99, 0.5);
      const auto b = evaluate(sel, factory, 4, 17, 0.99, 0.5);
      CHECK(a.discounted_costs == b.discounted_costs);
      CHECK(a.mean_packet_rate == b.mean_packet_rate);
      CHECK(a.satisfied_fraction == doctest::Approx(1.0 - ccdf_at(a.discounted_costs, 0.5)));
    }
  }
  CHECK(parse_action_mode("sample") == ActionMode::sample);
  CHECK_THROWS(parse_action_mode("mode"));
}
