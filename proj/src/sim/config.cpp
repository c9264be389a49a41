#include "crosstwin/sim/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError(field + ": " + why);
}

}  // namespace

PredictorKind parse_predictor(std::string_view text) {
  if (text == "linear_extrapolation") return PredictorKind::linear_extrapolation;
  if (text == "hold_last") return PredictorKind::hold_last;
  fail("sim.predictor", "unknown predictor '" + std::string(text) + "'");
}

std::string_view predictor_name(PredictorKind kind) {
  return kind == PredictorKind::hold_last ? "hold_last" : "linear_extrapolation";
}

PdForm parse_pd_form(std::string_view text) {
  if (text == "incremental") return PdForm::incremental;
  if (text == "literal") return PdForm::literal;
  fail("sim.pd_form", "unknown form '" + std::string(text) + "'");
}

std::string_view pd_form_name(PdForm form) { return form == PdForm::literal ? "literal" : "incremental"; }

void SimConfig::validate() const {
  if (!(slot_ms > 0.0) || !std::isfinite(slot_ms)) fail("sim.slot_ms", "must be positive");
  if (joint_count == 0) fail("sim.joint_count", "must be at least 1");
  if (reconstruction_window < 2) fail("sim.reconstruction_window", "must be at least 2");
  if (prediction_window < 2) fail("sim.prediction_window", "must be at least 2");
  if (max_horizon < 1) fail("sim.max_horizon", "must be at least 1");
  if (control_interval < 1) fail("sim.control_interval", "must be at least 1");
  if (render_interval < 1) fail("sim.render_interval", "must be at least 1");
  if (!std::isfinite(kp) || !std::isfinite(kd)) fail("sim.kp/kd", "must be finite");
  if (!(w_position >= 0.0) || !(w_orientation >= 0.0)) fail("sim.w_position/w_orientation", "must be non-negative");
  if (!std::isfinite(latency_mean_ms)) fail("sim.latency_mean_ms", "must be finite");
  if (!(latency_std_ms >= 0.0) || !std::isfinite(latency_std_ms)) fail("sim.latency_std_ms", "must be non-negative");
  if (episode_length <= prediction_window) {
    fail("sim.episode_length", "must exceed the prediction window (the warm-up)");
  }
  if (fit_window < 2) fail("sim.fit_window", "must be at least 2");
}

std::size_t TrajectorySource::joint_count() const {
  return kind == Kind::synthetic_sines ? amplitude.size()
                                       : (samples.empty() ? 0 : static_cast<std::size_t>(samples.front().size()));
}

Eigen::VectorXd TrajectorySource::angles(long slot, double slot_seconds) const {
  if (kind == Kind::synthetic_sines) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(amplitude.size()));
    const double t = static_cast<double>(slot) * slot_seconds;
    for (std::size_t i = 0; i < amplitude.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] =
          amplitude[i] * std::sin(2.0 * std::numbers::pi * frequency_hz[i] * t + phase[i]);
    }
    return out;
  }
  const long s = slots.front() + slot;
  if (s <= slots.front()) return samples.front();
  if (s >= slots.back()) return samples.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(slots.begin(), slots.end(), s) - slots.begin());
  const std::size_t lo = hi - 1;
  if (slots[lo] == s) return samples[lo];
  const double w = static_cast<double>(s - slots[lo]) / static_cast<double>(slots[hi] - slots[lo]);
  return samples[lo] + w * (samples[hi] - samples[lo]);
}

long TrajectorySource::max_start(std::size_t episode_length) const {
  const long jitter = static_cast<long>(start_jitter);
  if (kind == Kind::synthetic_sines) return jitter;
  const long room = slots.back() - slots.front() - static_cast<long>(episode_length);
  return std::clamp(room, 0L, jitter);
}

void TrajectorySource::validate(const SimConfig& config) const {
  if (joint_count() != config.joint_count) {
    fail("trajectory", "provides " + std::to_string(joint_count()) + " joints, sim expects " +
                           std::to_string(config.joint_count));
  }
  if (kind == Kind::synthetic_sines) {
    if (frequency_hz.size() != amplitude.size() || phase.size() != amplitude.size()) {
      fail("trajectory", "amplitude, frequency_hz and phase need one entry per joint");
    }
    const double nyquist = 1.0 / (2.0 * config.slot_seconds());
    for (std::size_t i = 0; i < amplitude.size(); ++i) {
      if (!std::isfinite(amplitude[i]) || !std::isfinite(phase[i])) fail("trajectory", "values must be finite");
      if (!(frequency_hz[i] >= 0.0) || !(frequency_hz[i] < nyquist)) {
        fail("trajectory.frequency_hz", "must lie in [0, " + std::to_string(nyquist) + ") Hz");
      }
    }
    return;
  }
  if (slots.size() != samples.size() || slots.size() < 2) fail("trajectory", "playback needs at least two samples");
  for (std::size_t k = 1; k < slots.size(); ++k) {
    if (slots[k] <= slots[k - 1]) fail("trajectory", "playback slots must be strictly increasing");
  }
  for (const auto& s : samples) {
    if (static_cast<std::size_t>(s.size()) != config.joint_count || !s.allFinite()) {
      fail("trajectory", "playback rows must hold one finite angle per joint");
    }
  }
  if (slots.back() - slots.front() < static_cast<long>(config.episode_length)) {
    fail("trajectory", "playback recording is shorter than one episode");
  }
}

}  // namespace crosstwin::sim
