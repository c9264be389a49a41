#include "crosstwin/sim/twin_environment.hpp"

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

TwinEnvironment::TwinEnvironment(SimConfig config, kin::KinematicChain chain, TrajectorySource source,
                                 std::shared_ptr<const MinMaxTable> norm)
    : config_(config), sim_(std::move(config), std::move(chain), std::move(source)), norm_(std::move(norm)) {
  if (!norm_ || static_cast<std::size_t>(norm_->lo.size()) != observation_size()) {
    throw DimensionError("normalization table does not match the observation size");
  }
}

Eigen::VectorXd TwinEnvironment::observe() const {
  return norm_->apply(state_features(sim_.chain(), sim_.true_angles(sim_.slot())));
}

Eigen::VectorXd TwinEnvironment::reset(std::uint64_t seed) {
  sim_.reset(seed);
  const std::vector<int> ones(config_.joint_count, 1);
  for (std::size_t k = 0; k < config_.prediction_window; ++k) last_ = sim_.advance(ones, {}, false);
  return observe();
}

rl::Transition TwinEnvironment::step(const rl::Action& action) {
  if (sim_.slot() >= static_cast<long>(config_.episode_length)) {
    throw ValidityError("step() after the end of the episode; call reset()");
  }
  last_ = sim_.advance(action.schedule, action.horizon, true);
  rl::Transition tr;
  tr.observation = observe();
  tr.reward = last_.reward;
  tr.cost = last_.cost;
  tr.packets = last_.packets;
  tr.done = sim_.slot() >= static_cast<long>(config_.episode_length);
  return tr;
}

rl::EnvironmentFactory make_twin_factory(const SimConfig& config, const kin::KinematicChain& chain,
                                         const TrajectorySource& source) {
  config.validate();
  source.validate(config);
  auto norm = std::make_shared<const MinMaxTable>(calibrate(config, chain, source));
  return [config, chain, source, norm]() -> std::unique_ptr<rl::Environment> {
    return std::make_unique<TwinEnvironment>(config, chain, source, norm);
  };
}

}  // namespace crosstwin::sim
