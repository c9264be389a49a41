#pragma once

#include <memory>

#include "crosstwin/rl/environment.hpp"
#include "crosstwin/sim/normalizer.hpp"
#include "crosstwin/sim/simulator.hpp"

namespace crosstwin::sim {

/// The simulator as an RL environment. reset() runs the W_p warm-up slots
/// with every joint transmitting; each step() is one slot afterwards.
class TwinEnvironment final : public rl::Environment {
 public:
  TwinEnvironment(SimConfig config, kin::KinematicChain chain, TrajectorySource source,
                  std::shared_ptr<const MinMaxTable> norm);

  std::size_t observation_size() const override { return 7 * config_.joint_count; }
  std::size_t joint_count() const override { return config_.joint_count; }
  std::size_t max_horizon() const override { return config_.max_horizon; }
  double slot_seconds() const override { return config_.slot_seconds(); }
  Eigen::VectorXd reset(std::uint64_t seed) override;
  rl::Transition step(const rl::Action& action) override;

  const Simulator& simulator() const { return sim_; }
  const SlotOutcome& last_outcome() const { return last_; }

 private:
  Eigen::VectorXd observe() const;

  SimConfig config_;
  Simulator sim_;
  std::shared_ptr<const MinMaxTable> norm_;
  SlotOutcome last_;
};

/// Factory sharing one calibrated normalization table across instances.
rl::EnvironmentFactory make_twin_factory(const SimConfig& config, const kin::KinematicChain& chain,
                                         const TrajectorySource& source);

}  // namespace crosstwin::sim
