#include "crosstwin/app/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "crosstwin/app/atomic_file.hpp"
#include "crosstwin/app/ini.hpp"
#include "crosstwin/errors.hpp"
#include "crosstwin/kinematics/chains.hpp"
#include "crosstwin/rl/checkpoint.hpp"
#include "crosstwin/rl/evaluate.hpp"
#include "crosstwin/sim/csv.hpp"

namespace crosstwin::app {

namespace {

using sim::format_double;

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || std::isnan(x)) throw ConfigError(key + ": '" + v + "' is not a number");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  if (v.empty() || v[0] == '-') throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  const auto x = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean (true/false)");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (v.empty()) return out;
  std::string cell;
  std::istringstream in(v);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + fmt(xs[k]);
  return out;
}

struct Field {
  std::string name;  // section.key
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class M>
Field real(const std::string& name, M member) {
  return {name, [member](const RunConfig& c) { return format_double(member(const_cast<RunConfig&>(c))); },
          [member, name](RunConfig& c, const std::string& v) { member(c) = to_double(name, v); }};
}

template <class M>
Field count(const std::string& name, M member) {
  return {name, [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); },
          [member, name](RunConfig& c, const std::string& v) {
            member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(to_u64(name, v));
          }};
}

template <class M>
Field flag(const std::string& name, M member) {
  return {name, [member](const RunConfig& c) { return std::string(member(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [member, name](RunConfig& c, const std::string& v) { member(c) = to_bool(name, v); }};
}

template <class M>
Field text(const std::string& name, M member) {
  return {name, [member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); },
          [member](RunConfig& c, const std::string& v) { member(c) = v; }};
}

template <class M>
Field reals(const std::string& name, M member) {
  return {name,
          [member](const RunConfig& c) {
            return join(member(const_cast<RunConfig&>(c)), [](double x) { return format_double(x); });
          },
          [member, name](RunConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const auto& cell : split_list(v)) out.push_back(to_double(name, cell));
            member(c) = out;
          }};
}

template <class M>
Field counts(const std::string& name, M member) {
  return {name,
          [member](const RunConfig& c) {
            return join(member(const_cast<RunConfig&>(c)), [](std::size_t x) { return std::to_string(x); });
          },
          [member, name](RunConfig& c, const std::string& v) {
            std::vector<std::size_t> out;
            for (const auto& cell : split_list(v)) out.push_back(static_cast<std::size_t>(to_u64(name, cell)));
            member(c) = out;
          }};
}

#define M(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(text("run.profile", M(profile)));
    f.push_back(count("run.seed", M(seed)));
    f.push_back(text("run.out_dir", M(out_dir)));
    f.push_back(count("run.eval_episodes", M(eval_episodes)));
    f.push_back(text("run.eval_mode", M(eval_mode)));

    f.push_back(real("sim.slot_ms", M(sim.slot_ms)));
    f.push_back(count("sim.joint_count", M(sim.joint_count)));
    f.push_back(count("sim.reconstruction_window", M(sim.reconstruction_window)));
    f.push_back(count("sim.prediction_window", M(sim.prediction_window)));
    f.push_back(count("sim.max_horizon", M(sim.max_horizon)));
    f.push_back(count("sim.control_interval", M(sim.control_interval)));
    f.push_back(count("sim.render_interval", M(sim.render_interval)));
    f.push_back(real("sim.kp", M(sim.kp)));
    f.push_back(real("sim.kd", M(sim.kd)));
    f.push_back(real("sim.w_position", M(sim.w_position)));
    f.push_back(real("sim.w_orientation", M(sim.w_orientation)));
    f.push_back(real("sim.latency_mean_ms", M(sim.latency_mean_ms)));
    f.push_back(real("sim.latency_std_ms", M(sim.latency_std_ms)));
    f.push_back(count("sim.episode_length", M(sim.episode_length)));
    f.push_back({"sim.predictor", [](const RunConfig& c) { return std::string(sim::predictor_name(c.sim.predictor)); },
                 [](RunConfig& c, const std::string& v) { c.sim.predictor = sim::parse_predictor(v); }});
    f.push_back(count("sim.fit_window", M(sim.fit_window)));
    f.push_back({"sim.pd_form", [](const RunConfig& c) { return std::string(sim::pd_form_name(c.sim.pd_form)); },
                 [](RunConfig& c, const std::string& v) { c.sim.pd_form = sim::parse_pd_form(v); }});

    f.push_back(real("trainer.gamma", M(trainer.gamma)));
    f.push_back(real("trainer.gae_lambda", M(trainer.gae_lambda)));
    f.push_back(real("trainer.clip", M(trainer.clip)));
    f.push_back(real("trainer.lr_policy", M(trainer.lr_policy)));
    f.push_back(real("trainer.lr_reward_value", M(trainer.lr_reward_value)));
    f.push_back(real("trainer.lr_cost_value", M(trainer.lr_cost_value)));
    f.push_back(count("trainer.minibatch_size", M(trainer.minibatch_size)));
    f.push_back(count("trainer.rollout_steps", M(trainer.rollout_steps)));
    f.push_back(count("trainer.epochs", M(trainer.epochs)));
    f.push_back(real("trainer.cost_threshold", M(trainer.cost_threshold)));
    f.push_back(count("trainer.total_steps", M(trainer.total_steps)));
    f.push_back(real("trainer.entropy_coef", M(trainer.entropy_coef)));
    f.push_back(real("trainer.max_grad_norm", M(trainer.max_grad_norm)));
    f.push_back(flag("trainer.shuffle", M(trainer.shuffle)));
    f.push_back(flag("trainer.normalize_advantages", M(trainer.normalize_advantages)));
    f.push_back(flag("trainer.keep_last_feasible", M(trainer.keep_last_feasible)));
    f.push_back(real("trainer.cvar_worst_fraction", M(trainer.cvar_worst_fraction)));
    f.push_back(real("trainer.cvar_step", M(trainer.cvar_step)));
    f.push_back({"trainer.cvar_iterations", [](const RunConfig& c) { return std::to_string(c.trainer.cvar_iterations); },
                 [](RunConfig& c, const std::string& v) {
                   const auto n = to_u64("trainer.cvar_iterations", v);
                   if (n > 100000000) throw ConfigError("trainer.cvar_iterations: too large");
                   c.trainer.cvar_iterations = static_cast<int>(n);
                 }});
    f.push_back(count("trainer.cvar_window_batches", M(trainer.cvar_window_batches)));
    f.push_back(counts("trainer.trunk_widths", M(trainer.trunk_widths)));
    f.push_back(counts("trainer.value_widths", M(trainer.value_widths)));

    f.push_back(text("chain.name", M(chain.name)));
    f.push_back(reals("chain.lengths", M(chain.lengths)));
    f.push_back(reals("chain.dh_rows", M(chain.dh_rows)));

    f.push_back(text("trajectory.kind", M(trajectory.kind)));
    f.push_back(reals("trajectory.amplitude", M(trajectory.amplitude)));
    f.push_back(reals("trajectory.frequency_hz", M(trajectory.frequency_hz)));
    f.push_back(reals("trajectory.phase", M(trajectory.phase)));
    f.push_back(count("trajectory.start_jitter", M(trajectory.start_jitter)));
    f.push_back(text("trajectory.csv_path", M(trajectory.csv_path)));
    return f;
  }();
  return table;
}

#undef M

}  // namespace

std::vector<std::string> profile_names() { return {"desk", "paper", "smoke"}; }

RunConfig profile_defaults(std::string_view name) {
  RunConfig c;  // desk defaults live in the struct initializers
  c.profile = std::string(name);
  c.trainer.cost_threshold = 0.005;
  if (name == "desk") return c;
  if (name == "smoke") {
    c.sim.episode_length = 600;
    c.sim.prediction_window = 100;
    c.sim.reconstruction_window = 100;
    c.trainer.total_steps = 2000;
    c.trainer.rollout_steps = 500;
    c.trainer.minibatch_size = 125;
    c.trainer.epochs = 2;
    c.trainer.trunk_widths = {32, 32};
    c.trainer.value_widths = {32, 32};
    c.eval_episodes = 5;
    return c;
  }
  if (name == "paper") {
    c.sim.joint_count = 5;
    c.sim.reconstruction_window = 2000;
    c.sim.prediction_window = 2000;
    c.sim.max_horizon = 500;
    c.sim.control_interval = 2;
    c.sim.render_interval = 17;  // ~60 Hz at 1 ms slots
    c.sim.episode_length = 50000;
    c.trainer.cost_threshold = 0.25;
    c.trainer.total_steps = 300000;
    c.chain.name = "panda5";
    c.chain.lengths.clear();
    c.trajectory.amplitude = {0.5, 0.4, 0.4, 0.3, 0.3};
    c.trajectory.frequency_hz = {0.2, 0.3, 0.4, 0.5, 0.6};
    c.trajectory.phase = {0.0, 1.0, 2.0, 3.0, 4.0};
    c.trajectory.start_jitter = 100000;
    return c;
  }
  throw ConfigError("unknown profile '" + std::string(name) + "' (expected desk, paper or smoke)");
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.name == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + key + "'");
}

void apply_ini(RunConfig& config, const std::string& text) {
  for (const auto& e : parse_ini(text)) {
    try {
      apply_setting(config, e.section + "." + e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
    }
  }
}

std::string profile_in(const std::string& text) {
  std::string profile;
  for (const auto& e : parse_ini(text)) {
    if (e.section == "run" && e.key == "profile") profile = e.value;
  }
  return profile;
}

namespace {

std::string dump_sections(const RunConfig& config, bool include_run) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.name.find('.');
    const std::string sec = f.name.substr(0, dot);
    if (sec == "run" && !include_run) continue;
    if (sec != section) {
      os << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    os << f.name.substr(dot + 1) << " = " << f.get(config) << '\n';
  }
  return os.str();
}

}  // namespace

std::string dump_run_config(const RunConfig& config) { return dump_sections(config, true); }

std::uint64_t config_hash(const RunConfig& config) { return rl::fnv1a(dump_sections(config, false)); }

void RunConfig::validate() const {
  profile_defaults(profile);
  if (eval_episodes == 0) throw ConfigError("run.eval_episodes: must be at least 1");
  rl::parse_action_mode(eval_mode);
  sim.validate();
  trainer.validate();
  const auto chain = build_chain(*this);
  if (chain.joint_count() != sim.joint_count) {
    throw ConfigError("chain.name: chain '" + this->chain.name + "' has " + std::to_string(chain.joint_count()) +
                      " joints but sim.joint_count is " + std::to_string(sim.joint_count));
  }
  if (trajectory.kind == "synthetic_sines") {
    sim::TrajectorySource src;
    src.amplitude = trajectory.amplitude;
    src.frequency_hz = trajectory.frequency_hz;
    src.phase = trajectory.phase;
    src.validate(sim);
  } else if (trajectory.kind == "csv_playback") {
    if (trajectory.csv_path.empty()) throw ConfigError("trajectory.csv_path: required for csv_playback");
  } else {
    throw ConfigError("trajectory.kind: unknown kind '" + trajectory.kind + "'");
  }
}

kin::KinematicChain build_chain(const RunConfig& config) {
  const auto& c = config.chain;
  if (c.name == "planar3") {
    if (c.lengths.size() != 3) throw ConfigError("chain.lengths: planar3 needs three link lengths");
    for (double l : c.lengths) {
      if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("chain.lengths: lengths must be positive");
    }
    return kin::planar3_chain(Eigen::Vector3d(c.lengths[0], c.lengths[1], c.lengths[2]));
  }
  if (c.name == "custom") {
    if (c.dh_rows.empty() || c.dh_rows.size() % 3 != 0) {
      throw ConfigError("chain.dh_rows: expected a,d,alpha triples");
    }
    kin::KinematicChain chain;
    for (std::size_t k = 0; k < c.dh_rows.size() / 3; ++k) {
      chain.rows.push_back({c.dh_rows[3 * k], c.dh_rows[3 * k + 1], c.dh_rows[3 * k + 2], static_cast<int>(k + 1)});
    }
    try {
      kin::validate_chain(chain);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("chain.dh_rows: ") + e.what());
    }
    return chain;
  }
  if (auto chain = kin::builtin_chain(c.name)) return *chain;
  throw ConfigError("chain.name: unknown chain '" + c.name + "'");
}

sim::TrajectorySource build_source(const RunConfig& config) {
  sim::TrajectorySource src;
  if (config.trajectory.kind == "csv_playback") {
    src = sim::parse_trajectory_csv(read_file(config.trajectory.csv_path));
  } else {
    src.amplitude = config.trajectory.amplitude;
    src.frequency_hz = config.trajectory.frequency_hz;
    src.phase = config.trajectory.phase;
  }
  src.start_jitter = config.trajectory.start_jitter;
  src.validate(config.sim);
  return src;
}

}  // namespace crosstwin::app
