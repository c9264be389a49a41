#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace crosstwin::sim {

enum class PredictorKind { linear_extrapolation, hold_last };
enum class PdForm { incremental, literal };

PredictorKind parse_predictor(std::string_view text);
std::string_view predictor_name(PredictorKind kind);
PdForm parse_pd_form(std::string_view text);
std::string_view pd_form_name(PdForm form);

struct SimConfig {
  double slot_ms = 1.0;
  std::size_t joint_count = 3;
  std::size_t reconstruction_window = 200;  // W_l
  std::size_t prediction_window = 200;      // W_p, also the warm-up length
  std::size_t max_horizon = 50;             // H
  std::size_t control_interval = 1;         // N_c
  std::size_t render_interval = 1;          // N_r
  double kp = 1.0;
  double kd = 0.0;
  double w_position = 0.5;
  double w_orientation = 0.5;
  double latency_mean_ms = 10.0;
  double latency_std_ms = 1.0;
  std::size_t episode_length = 2000;
  PredictorKind predictor = PredictorKind::linear_extrapolation;
  // Points used by the least-squares line (capped at W_p).
  std::size_t fit_window = 10;
  PdForm pd_form = PdForm::incremental;

  double slot_seconds() const { return slot_ms * 1e-3; }
  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

struct TrajectorySource {
  enum class Kind { synthetic_sines, csv_playback };
  Kind kind = Kind::synthetic_sines;

  // synthetic: tau_i(t) = amplitude_i * sin(2 pi frequency_i t + phase_i)
  std::vector<double> amplitude;
  std::vector<double> frequency_hz;
  std::vector<double> phase;

  // playback: one row per sample, strictly increasing slots.
  std::vector<long> slots;
  std::vector<Eigen::VectorXd> samples;

  // Each episode starts at a seed-dependent offset in [0, start_jitter] slots
  // (bounded by the recording length for playback).
  std::size_t start_jitter = 0;

  std::size_t joint_count() const;
  /// Angles at absolute source slot; playback interpolates linearly between
  /// samples and holds the end values outside the recording.
  Eigen::VectorXd angles(long slot, double slot_seconds) const;
  /// Largest admissible episode start offset.
  long max_start(std::size_t episode_length) const;
  /// Throws ConfigError.
  void validate(const SimConfig& config) const;
};

}  // namespace crosstwin::sim
