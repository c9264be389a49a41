// crosstwin command-line entry point.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crosstwin/app/atomic_file.hpp"
#include "crosstwin/app/commands.hpp"
#include "crosstwin/app/run_config.hpp"
#include "crosstwin/errors.hpp"

namespace app = crosstwin::app;

namespace {

// Precedence: profile defaults < config file < --set < --seed/--out.
app::RunConfig load_config(const std::string& config_path, const std::string& profile_flag,
                           const std::vector<std::string>& sets, std::optional<std::uint64_t> seed,
                           const std::string& out_dir) {
  std::string text;
  if (!config_path.empty()) text = app::read_file(config_path);
  std::string profile = profile_flag;
  if (profile.empty()) profile = app::profile_in(text);
  if (profile.empty()) profile = "desk";
  app::RunConfig config = app::profile_defaults(profile);
  if (!text.empty()) {
    try {
      app::apply_ini(config, text);
    } catch (const crosstwin::ConfigError& e) {
      throw crosstwin::ConfigError(config_path + ": " + e.what());
    }
  }
  config.profile = profile;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw crosstwin::ConfigError("--set expects section.key=value, got '" + s + "'");
    app::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.out_dir = out_dir;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"crosstwin: digital-twin synchronization simulator and C-PPO trainer"};
  cli.require_subcommand(1);
  cli.fallthrough();

  std::string config_path;
  std::string profile;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  cli.add_option("--config", config_path, "INI configuration file");
  cli.add_option("--profile", profile, "Default profile")->check(CLI::IsMember({"desk", "paper", "smoke"}));
  cli.add_option("--seed", seed, "Random seed");
  cli.add_option("--out", out_dir, "Output directory");
  cli.add_option("--set", sets, "Override, section.key=value (repeatable)");

  auto* train = cli.add_subcommand("train", "Train a C-PPO policy");
  auto* evaluate = cli.add_subcommand("evaluate", "Evaluate a checkpoint and export the cost CCDF");
  std::string checkpoint;
  std::optional<std::size_t> episodes;
  evaluate->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  evaluate->add_option("--episodes", episodes, "Evaluation episodes");
  auto* baseline = cli.add_subcommand("baseline", "All-joints-every-slot baseline run");
  auto* kincheck = cli.add_subcommand("kincheck", "Finite-difference Jacobian check");
  std::string chain;
  kincheck->add_option("chain", chain, "panda7, panda5 or planar3")->required();
  auto* dump = cli.add_subcommand("config", "Print the effective configuration");

  CLI11_PARSE(cli, argc, argv);

  try {
    if (kincheck->parsed()) return app::cmd_kincheck(chain, seed.value_or(0), std::cout);
    auto config = load_config(config_path, profile, sets, seed, out_dir);
    if (dump->parsed()) {
      std::cout << app::dump_run_config(config);
      return 0;
    }
    if (train->parsed()) return app::cmd_train(config, std::cout);
    if (evaluate->parsed()) {
      if (episodes) config.eval_episodes = *episodes;
      return app::cmd_evaluate(config, checkpoint, std::cout);
    }
    if (baseline->parsed()) return app::cmd_baseline(config, std::cout);
  } catch (const crosstwin::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
