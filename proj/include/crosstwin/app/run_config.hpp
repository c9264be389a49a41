#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crosstwin/kinematics/transform.hpp"
#include "crosstwin/rl/trainer.hpp"
#include "crosstwin/sim/config.hpp"

namespace crosstwin::app {

struct ChainConfig {
  std::string name = "planar3";  // planar3 | panda5 | panda7 | custom
  std::vector<double> lengths{0.4, 0.3, 0.2};  // planar3 only
  std::vector<double> dh_rows;                 // custom only: a,d,alpha per joint

  bool operator==(const ChainConfig&) const = default;
};

struct TrajectoryConfig {
  std::string kind = "synthetic_sines";  // synthetic_sines | csv_playback
  std::vector<double> amplitude{0.6, 0.5, 0.4};
  std::vector<double> frequency_hz{0.25, 0.4, 0.6};
  std::vector<double> phase{0.0, 1.0, 2.0};
  std::size_t start_jitter = 20000;
  std::string csv_path;

  bool operator==(const TrajectoryConfig&) const = default;
};

struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::size_t eval_episodes = 200;
  std::string eval_mode = "sample";  // sample | greedy
  sim::SimConfig sim;
  rl::TrainerConfig trainer;
  ChainConfig chain;
  TrajectoryConfig trajectory;

  /// Throws ConfigError naming the offending field. Does not touch the filesystem.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::vector<std::string> profile_names();
/// Throws ConfigError for unknown names.
RunConfig profile_defaults(std::string_view name);

/// Applies one `section.key = value` setting. Throws ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Applies every entry of an INI document on top of `config`.
void apply_ini(RunConfig& config, const std::string& text);
/// Profile named in the document's [run] section, if any.
std::string profile_in(const std::string& text);

/// Every field, INI formatted; parses back to an identical config.
std::string dump_run_config(const RunConfig& config);
/// Hash of everything except the [run] section.
std::uint64_t config_hash(const RunConfig& config);

kin::KinematicChain build_chain(const RunConfig& config);
/// Reads the playback CSV when configured.
sim::TrajectorySource build_source(const RunConfig& config);

}  // namespace crosstwin::app
