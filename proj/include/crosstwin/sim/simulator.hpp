#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

#include "crosstwin/kinematics/pose.hpp"
#include "crosstwin/sim/channel.hpp"
#include "crosstwin/sim/config.hpp"
#include "crosstwin/sim/reconstruction.hpp"

namespace crosstwin::sim {

struct SlotOutcome {
  long slot = 0;
  int packets = 0;
  double reward = 0.0;
  double cost = 0.0;            // weighted pose error
  double position_error = 0.0;  // meters
  bool cold_start = false;      // some joint fell back to its initial angle
  Eigen::VectorXd true_angles;
  Eigen::VectorXd rendered_angles;
};

/// One slot of the loop, in order: deliver arrivals, send scheduled samples,
/// apply the pending command on control slots, reconstruct the previous slot,
/// refresh prediction and the next command ahead of a control slot, render,
/// then score the rendered pose against the true one. Without prediction the
/// reconstruction drives the control slot directly, one slot sooner.
class Simulator {
 public:
  Simulator(SimConfig config, kin::KinematicChain chain, TrajectorySource source);

  void reset(std::uint64_t seed);
  /// `use_prediction` false drives control straight from reconstruction and
  /// ignores `horizon` (warm-up and baseline).
  SlotOutcome advance(std::span<const int> schedule, std::span<const int> horizon, bool use_prediction);

  long slot() const { return slot_; }
  long start_offset() const { return offset_; }
  Eigen::VectorXd true_angles(long slot) const;
  const Eigen::VectorXd& executed() const { return executed_; }
  const Eigen::VectorXd& rendered() const { return rendered_; }
  std::size_t packets_sent() const { return packets_total_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  const ReceiveBuffer& buffer() const { return buffer_; }
  const SimConfig& config() const { return config_; }
  const kin::KinematicChain& chain() const { return chain_; }
  const TrajectorySource& source() const { return source_; }

 private:
  double history_back(std::size_t joint, std::size_t k) const;
  double command(std::size_t joint, double target, double prior) const;

  SimConfig config_;
  kin::KinematicChain chain_;
  TrajectorySource source_;

  std::mt19937_64 rng_;
  long slot_ = 0;
  long offset_ = 0;
  Eigen::VectorXd initial_;
  Eigen::VectorXd executed_;
  Eigen::VectorXd executed_before_;  // value before the latest control update
  Eigen::VectorXd pending_;
  Eigen::VectorXd rendered_;
  std::vector<std::deque<double>> history_;  // reconstructed values, newest last
  std::vector<InFlightPacket> in_flight_;
  ReceiveBuffer buffer_;
  std::size_t packets_total_ = 0;
};

}  // namespace crosstwin::sim
