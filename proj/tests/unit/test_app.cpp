#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "crosstwin/app/atomic_file.hpp"
#include "crosstwin/app/commands.hpp"
#include "crosstwin/app/ini.hpp"
#include "crosstwin/app/run_config.hpp"
#include "crosstwin/errors.hpp"

using namespace crosstwin;
using namespace crosstwin::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("crosstwin_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::string line(const std::string& text, std::size_t k) {
  std::istringstream is(text);
  std::string l;
  for (std::size_t i = 0; i <= k; ++i) std::getline(is, l);
  return l;
}

}  // namespace

TEST_CASE("parse_ini") {
  const auto e = parse_ini("# comment\n[sim]\n  slot_ms = 2\n; another\n[trainer]\nepochs=3 # kept\n");
  REQUIRE(e.size() == 2);
  CHECK(e[0].section == "sim");
  CHECK(e[0].key == "slot_ms");
  CHECK(e[0].value == "2");
  CHECK(e[0].line == 3);
  CHECK(e[1].value == "3 # kept");

  auto message = [](const std::string& text) {
    try {
      parse_ini(text);
    } catch (const ConfigError& err) {
      return std::string(err.what());
    }
    return std::string();
  };
  CHECK(message("[sim\n").find("line 1") != std::string::npos);
  CHECK(message("[sim]\nnovalue\n").find("line 2") != std::string::npos);
  CHECK(message("key = 1\n").find("line 1") != std::string::npos);
  CHECK(message("[]\n") != "");
  CHECK(message("[a]\n = 3\n") != "");
}

TEST_CASE("settings") {
  auto c = profile_defaults("desk");
  apply_setting(c, "sim.kp", "0.5");
  CHECK(c.sim.kp == 0.5);
  apply_setting(c, "trainer.trunk_widths", "64,32");
  CHECK(c.trainer.trunk_widths == std::vector<std::size_t>{64, 32});
  apply_setting(c, "sim.predictor", "hold_last");
  CHECK(c.sim.predictor == sim::PredictorKind::hold_last);
  apply_setting(c, "trainer.shuffle", "false");
  CHECK_FALSE(c.trainer.shuffle);
  CHECK_THROWS_AS(apply_setting(c, "sim.nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "sim.kp", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "sim.episode_length", "-3"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "sim.predictor", "oracle"), ConfigError);
  CHECK_THROWS_AS(profile_defaults("laptop"), ConfigError);

  auto bad = profile_defaults("desk");
  apply_setting(bad, "trainer.cost_threshold", "0");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = profile_defaults("desk");
  apply_setting(bad, "sim.joint_count", "5");
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK_THROWS_AS(apply_ini(c, "[sim]\nkp = 1\n[sim]\nbogus = 2\n"), ConfigError);
  try {
    apply_ini(c, "[sim]\nkp = 1\nbogus = 2\n");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  for (const auto& name : profile_names()) {
    auto c = profile_defaults(name);
    c.seed = 12345678901234ULL;
    c.sim.kd = 0.1 + 0.2;  // not representable in short decimal
    apply_setting(c, "chain.name", c.chain.name);
    const auto text = dump_run_config(c);
    RunConfig back = profile_defaults(profile_in(text));
    apply_ini(back, text);
    CHECK(back == c);
    CHECK(dump_run_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  auto a = profile_defaults("desk");
  auto b = a;
  b.seed = 99;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.sim.kp = 2.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("profiles") {
  const auto desk = profile_defaults("desk");
  CHECK(desk.sim.joint_count == 3);
  CHECK(desk.sim.episode_length == 2000);
  CHECK(desk.sim.max_horizon == 50);
  CHECK(desk.sim.prediction_window == 200);
  CHECK(desk.trainer.total_steps <= 300000);
  const auto paper = profile_defaults("paper");
  CHECK(paper.sim.joint_count == 5);
  CHECK(paper.sim.prediction_window == 2000);
  CHECK(paper.sim.max_horizon == 500);
  CHECK(paper.sim.control_interval == 2);
  CHECK(paper.trainer.gamma == 0.99);
  CHECK(paper.trainer.clip == 0.2);
  CHECK(paper.trainer.lr_policy == 3e-4);
  CHECK(rl::constraint_bound(paper.trainer.cost_threshold, paper.trainer.gamma) == doctest::Approx(25.0));
  for (const auto& name : profile_names()) CHECK_NOTHROW(profile_defaults(name).validate());
}

TEST_CASE("atomic files") {
  TempDir tmp;
  const auto p = tmp.path / "nested" / "dir" / "f.csv";
  write_file_atomic(p, "a,b\n1,2\n");
  CHECK(read_file(p) == "a,b\n1,2\n");
  write_file_atomic(p, "x\n");
  CHECK(read_file(p) == "x\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(p.parent_path())) ++files;
  CHECK(files == 1);  // no temporary left behind
  try {
    read_file(tmp.path / "missing.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("missing.ini") != std::string::npos);
  }
}

TEST_CASE("kincheck") {
  for (const char* name : {"panda7", "panda5", "planar3"}) {
    const auto r = kincheck(name, 1);
    CHECK(r.pass);
    CHECK(r.max_error < 1e-5);
    CHECK(r.samples == 200);
  }
  std::ostringstream os;
  CHECK(cmd_kincheck("planar3", 1, os) == 0);
  CHECK(os.str().find("PASS") != std::string::npos);
  CHECK_THROWS_AS(kincheck("ur5", 1), ConfigError);
}

TEST_CASE("baseline command") {
  TempDir tmp;
  auto c = profile_defaults("smoke");
  c.out_dir = tmp.path.string();
  std::ostringstream os;
  CHECK(cmd_baseline(c, os) == 0);
  CHECK(os.str().find("packet rate: 3000 packets/s") != std::string::npos);
  const auto first = read_file(tmp.path / "baseline_metrics.csv");
  CHECK(line(first, 0) == "slot,packets,reward,cost,error");
  CHECK(line_count(first) == 1 + c.sim.episode_length - c.sim.prediction_window);
  std::ostringstream again;
  cmd_baseline(c, again);
  CHECK(read_file(tmp.path / "baseline_metrics.csv") == first);
  CHECK(again.str() == os.str());
}

TEST_CASE("train and evaluate commands") {
  TempDir tmp;
  auto c = profile_defaults("smoke");
  c.out_dir = tmp.path.string();
  c.seed = 3;
  std::ostringstream os;
  REQUIRE(cmd_train(c, os) == 0);
  for (const char* f : {"checkpoint.txt", "training_metrics.csv", "updates.csv", "effective_config.ini"}) {
    CHECK(fs::exists(tmp.path / f));
  }
  const auto metrics = read_file(tmp.path / "training_metrics.csv");
  CHECK(line(metrics, 0) == "episode,avg_packet_rate,avg_error,cvar,branch");
  const std::size_t steps_per_episode = c.sim.episode_length - c.sim.prediction_window;
  CHECK(line_count(metrics) == 1 + c.trainer.total_steps / steps_per_episode);
  CHECK(os.str().find("final avg packet rate") != std::string::npos);
  CHECK(os.str().find("final CVaR") != std::string::npos);

  RunConfig reread = profile_defaults("smoke");
  apply_ini(reread, read_file(tmp.path / "effective_config.ini"));
  CHECK(reread == c);

  SUBCASE("single episode: one-step CCDF and satisfied fraction") {
    c.eval_episodes = 1;
    std::ostringstream ev;
    REQUIRE(cmd_evaluate(c, (tmp.path / "checkpoint.txt").string(), ev) == 0);
    const auto table = read_file(tmp.path / "evaluation.csv");
    CHECK(line(table, 0) == "cost,ccdf");
    CHECK(line_count(table) == 2);
    CHECK(line(table, 1).substr(line(table, 1).find(',')) == ",0");
    const auto summary = read_file(tmp.path / "evaluation_summary.csv");
    CHECK(summary.find("episodes,1\n") != std::string::npos);
  }
  SUBCASE("summary satisfies its definition") {
    c.eval_episodes = 4;
    std::ostringstream ev;
    REQUIRE(cmd_evaluate(c, (tmp.path / "checkpoint.txt").string(), ev) == 0);
    const auto summary = read_file(tmp.path / "evaluation_summary.csv");
    auto value = [&](const std::string& key) {
      const auto at = summary.find("\n" + key + ",");
      REQUIRE(at != std::string::npos);
      return std::stod(summary.substr(at + key.size() + 2));
    };
    CHECK(value("satisfied_fraction") == doctest::Approx(1.0 - value("ccdf_at_bound")));
  }
  SUBCASE("dimension mismatch is refused") {
    auto five = profile_defaults("paper");
    five.out_dir = tmp.path.string();
    try {
      cmd_evaluate(five, (tmp.path / "checkpoint.txt").string(), os);
      FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("I=3") != std::string::npos);
    }
  }
  SUBCASE("missing checkpoint names the path") {
    try {
      cmd_evaluate(c, (tmp.path / "nope.txt").string(), os);
      FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("nope.txt") != std::string::npos);
    }
  }
}
