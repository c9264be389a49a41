#include "crosstwin/sim/simulator.hpp"

#include <algorithm>
#include <string>

#include "crosstwin/errors.hpp"
#include "crosstwin/sim/control.hpp"
#include "crosstwin/sim/prediction.hpp"

namespace crosstwin::sim {

Simulator::Simulator(SimConfig config, kin::KinematicChain chain, TrajectorySource source)
    : config_(std::move(config)), chain_(std::move(chain)), source_(std::move(source)) {
  config_.validate();
  kin::validate_chain(chain_);
  if (chain_.joint_count() != config_.joint_count) {
    throw ConfigError("chain has " + std::to_string(chain_.joint_count()) + " joints, sim.joint_count is " +
                      std::to_string(config_.joint_count));
  }
  source_.validate(config_);
  reset(0);
}

Eigen::VectorXd Simulator::true_angles(long slot) const {
  return source_.angles(offset_ + slot, config_.slot_seconds());
}

void Simulator::reset(std::uint64_t seed) {
  rng_.seed(seed);
  offset_ = std::uniform_int_distribution<long>(0, source_.max_start(config_.episode_length))(rng_);
  slot_ = 0;
  initial_ = true_angles(0);
  executed_ = initial_;
  executed_before_ = initial_;
  pending_ = initial_;
  rendered_ = initial_;
  history_.assign(config_.joint_count, {});
  in_flight_.clear();
  buffer_ = ReceiveBuffer(config_.joint_count);
  packets_total_ = 0;
}

double Simulator::history_back(std::size_t joint, std::size_t k) const {
  const auto& h = history_[joint];
  if (h.empty()) return initial_[static_cast<Eigen::Index>(joint)];
  return k < h.size() ? h[h.size() - 1 - k] : h.front();
}

double Simulator::command(std::size_t joint, double target, double prior) const {
  const auto ix = static_cast<Eigen::Index>(joint);
  const double nc = static_cast<double>(config_.control_interval);
  const double target_rate = (target - prior) / nc;
  const double prev_rate = (executed_[ix] - executed_before_[ix]) / nc;
  return pd_control(target, target_rate, executed_[ix], prev_rate, config_.kp, config_.kd, config_.pd_form);
}

SlotOutcome Simulator::advance(std::span<const int> schedule, std::span<const int> horizon, bool use_prediction) {
  const std::size_t joints = config_.joint_count;
  if (schedule.size() != joints) throw DimensionError("schedule needs one entry per joint");
  for (int x : schedule) {
    if (x != 0 && x != 1) throw ValidityError("schedule entries must be 0 or 1");
  }
  if (use_prediction) {
    if (horizon.size() != joints) throw DimensionError("horizon needs one entry per joint");
    for (int z : horizon) {
      if (z < 1 || static_cast<std::size_t>(z) > config_.max_horizon) {
        throw RangeError("prediction horizon " + std::to_string(z) + " outside [1, H]");
      }
    }
  }

  const long t = slot_;
  const auto nc = static_cast<long>(config_.control_interval);
  SlotOutcome out;
  out.slot = t;

  // Deliver arrivals.
  auto arrived = std::stable_partition(in_flight_.begin(), in_flight_.end(),
                                       [t](const InFlightPacket& p) { return p.arrival_slot > t; });
  for (auto it = arrived; it != in_flight_.end(); ++it) buffer_.insert(it->joint, it->sent_slot, it->value);
  in_flight_.erase(arrived, in_flight_.end());

  // Sense and send.
  out.true_angles = true_angles(t);
  for (std::size_t i = 0; i < joints; ++i) {
    if (schedule[i] == 0) continue;
    in_flight_.push_back(channel_send(i, out.true_angles[static_cast<Eigen::Index>(i)], t, config_.latency_mean_ms,
                                      config_.latency_std_ms, config_.slot_ms, rng_));
    ++out.packets;
  }
  packets_total_ += static_cast<std::size_t>(out.packets);

  // With prediction the command for a control slot is computed one slot
  // ahead (inference delay); without it reconstruction drives the control
  // slot directly.
  if (use_prediction && t % nc == 0) {
    executed_before_ = executed_;
    executed_ = pending_;
  }

  // Reconstruct the previous slot from what has arrived.
  const std::size_t keep = config_.prediction_window + config_.control_interval + 1;
  for (std::size_t i = 0; i < joints; ++i) {
    const auto rec = reconstruct(buffer_.samples(i), t - 1, config_.reconstruction_window,
                                 initial_[static_cast<Eigen::Index>(i)]);
    out.cold_start = out.cold_start || rec.cold_start;
    auto& h = history_[i];
    h.push_back(rec.value);
    while (h.size() > keep) h.pop_front();
  }

  if (!use_prediction) {
    if (t % nc == 0) {
      executed_before_ = executed_;
      for (std::size_t i = 0; i < joints; ++i) {
        const auto ix = static_cast<Eigen::Index>(i);
        executed_[ix] = command(i, history_back(i, 0), history_back(i, config_.control_interval));
      }
    }
    pending_ = executed_;
  } else if ((t + 1) % nc == 0) {
    std::vector<double> window;
    Eigen::VectorXd next(static_cast<Eigen::Index>(joints));
    for (std::size_t i = 0; i < joints; ++i) {
      const auto& h = history_[i];
      const std::size_t n = std::min(h.size(), config_.prediction_window);
      window.assign(h.end() - static_cast<long>(n), h.end());
      const auto forecast = predict(window, config_.predictor, config_.max_horizon, config_.fit_window);
      const auto z = static_cast<long>(horizon[i]);
      const double target = forecast[static_cast<std::size_t>(z - 1)];
      const double prior = z > nc ? forecast[static_cast<std::size_t>(z - nc - 1)]
                                  : history_back(i, static_cast<std::size_t>(nc - z));
      next[static_cast<Eigen::Index>(i)] = command(i, target, prior);
    }
    pending_ = next;
  }

  rendered_ = render(executed_, rendered_, t, config_.render_interval);
  out.rendered_angles = rendered_;

  const auto real = kin::forward_kinematics(chain_, out.true_angles);
  const auto virt = kin::forward_kinematics(chain_, rendered_);
  out.cost = kin::pose_error(real, virt, config_.w_position, config_.w_orientation);
  out.position_error = (real.position - virt.position).norm();
  out.reward = static_cast<double>(static_cast<long>(joints) - out.packets) / static_cast<double>(joints);

  buffer_.prune(t - static_cast<long>(config_.reconstruction_window + config_.prediction_window));
  ++slot_;
  return out;
}

}  // namespace crosstwin::sim
