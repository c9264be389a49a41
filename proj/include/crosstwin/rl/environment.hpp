#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace crosstwin::rl {

/// Per-joint scheduling bits (1 = transmit) and prediction horizons in [1, H].
struct Action {
  std::vector<int> schedule;
  std::vector<int> horizon;
};

struct Transition {
  Eigen::VectorXd observation;  // state after the step
  double reward = 0.0;
  double cost = 0.0;
  bool done = false;
  int packets = 0;
};

/// Episodic environment with a factored (schedule, horizon) action per joint.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t observation_size() const = 0;
  virtual std::size_t joint_count() const = 0;
  virtual std::size_t max_horizon() const = 0;
  // Slot duration, used to convert packet counts into packets per second.
  virtual double slot_seconds() const = 0;

  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual Transition step(const Action& action) = 0;
};

using EnvironmentFactory = std::function<std::unique_ptr<Environment>()>;

}  // namespace crosstwin::rl
