#include "crosstwin/app/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "crosstwin/app/atomic_file.hpp"
#include "crosstwin/errors.hpp"
#include "crosstwin/kinematics/chains.hpp"
#include "crosstwin/kinematics/planar3.hpp"
#include "crosstwin/kinematics/pose.hpp"
#include "crosstwin/rl/checkpoint.hpp"
#include "crosstwin/rl/evaluate.hpp"
#include "crosstwin/sim/baseline.hpp"
#include "crosstwin/sim/csv.hpp"
#include "crosstwin/sim/twin_environment.hpp"

namespace crosstwin::app {

namespace fs = std::filesystem;
using sim::format_double;

namespace {

std::string episodes_csv(const std::vector<rl::EpisodeRecord>& episodes) {
  std::ostringstream os;
  os << "episode,avg_packet_rate,avg_error,cvar,branch\n";
  for (const auto& e : episodes) {
    os << e.episode << ',' << format_double(e.avg_packet_rate) << ',' << format_double(e.avg_error) << ','
       << format_double(e.cvar) << ',' << rl::branch_name(e.branch) << '\n';
  }
  return os.str();
}

std::string updates_csv(const std::vector<rl::UpdateRecord>& updates) {
  std::ostringstream os;
  os << "update,steps,cvar,var_threshold,bound,branch,batch_packet_rate,batch_error,policy_loss,"
        "reward_value_loss,cost_value_loss,clip_fraction\n";
  for (const auto& u : updates) {
    os << u.update << ',' << u.steps << ',' << format_double(u.cvar) << ',' << format_double(u.var_threshold) << ','
       << format_double(u.bound) << ',' << rl::branch_name(u.branch) << ',' << format_double(u.batch_packet_rate)
       << ',' << format_double(u.batch_error) << ',' << format_double(u.diagnostics.policy_loss) << ','
       << format_double(u.diagnostics.reward_value_loss) << ',' << format_double(u.diagnostics.cost_value_loss)
       << ',' << format_double(u.diagnostics.clip_fraction) << '\n';
  }
  return os.str();
}

}  // namespace

int cmd_train(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto chain = build_chain(config);
  const auto source = build_source(config);
  const auto factory = sim::make_twin_factory(config.sim, chain, source);
  const fs::path dir = config.out_dir;
  write_file_atomic(dir / "effective_config.ini", dump_run_config(config));

  const auto result = rl::train(factory, config.trainer, config.seed, [&](const rl::UpdateRecord& u) {
    out << "update " << u.update << " steps " << u.steps << " packet_rate " << u.batch_packet_rate << " error "
        << u.batch_error << " cvar " << u.cvar << " bound " << u.bound << " branch " << rl::branch_name(u.branch)
        << '\n';
  });

  write_file_atomic(dir / "training_metrics.csv", episodes_csv(result.episodes));
  write_file_atomic(dir / "updates.csv", updates_csv(result.updates));
  rl::Checkpoint ck{config_hash(config), result.policy, result.reward_head, result.cost_head};
  write_file_atomic(dir / "checkpoint.txt", rl::serialize_checkpoint(ck));

  const auto& last = result.updates.back();
  const auto& chosen = result.selected_update ? result.updates[*result.selected_update] : last;
  std::ostringstream summary;
  summary << "metric,value\n"
          << "updates," << result.updates.size() << '\n'
          << "steps," << last.steps << '\n'
          << "episodes," << result.episodes.size() << '\n'
          << "bound," << format_double(last.bound) << '\n'
          << "final_packet_rate," << format_double(last.batch_packet_rate) << '\n'
          << "final_error," << format_double(last.batch_error) << '\n'
          << "final_cvar," << format_double(last.cvar) << '\n'
          << "returned_update," << (result.selected_update ? std::to_string(*result.selected_update) : "final") << '\n'
          << "returned_packet_rate," << format_double(chosen.batch_packet_rate) << '\n'
          << "returned_error," << format_double(chosen.batch_error) << '\n'
          << "returned_cvar," << format_double(chosen.cvar) << '\n';
  write_file_atomic(dir / "training_summary.csv", summary.str());

  out << "final avg packet rate: " << last.batch_packet_rate << " packets/s\n"
      << "final avg error: " << last.batch_error << '\n'
      << "final CVaR: " << last.cvar << " (bound " << last.bound << ")\n"
      << "episodes: " << result.episodes.size() << '\n';
  if (result.selected_update) {
    const auto& sel = result.updates[*result.selected_update];
    out << "returned policy: update " << sel.update << " (packet rate " << sel.batch_packet_rate << " packets/s, CVaR "
        << sel.cvar << ")\n";
  } else {
    out << "returned policy: final iterate (no batch met the constraint)\n";
  }
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& checkpoint_path, std::ostream& out) {
  config.validate();
  const auto ck = rl::parse_checkpoint(read_file(checkpoint_path));
  const auto& shape = ck.policy.shape();
  const std::size_t joints = config.sim.joint_count;
  if (shape.joint_count != joints || shape.max_horizon != config.sim.max_horizon ||
      shape.observation_size != 7 * joints) {
    throw ConfigError("checkpoint " + checkpoint_path + " was trained for I=" + std::to_string(shape.joint_count) +
                      ", H=" + std::to_string(shape.max_horizon) + " but the config has I=" + std::to_string(joints) +
                      ", H=" + std::to_string(config.sim.max_horizon));
  }
  if (ck.config_hash != config_hash(config)) {
    out << "warning: checkpoint was trained under a different configuration\n";
  }
  const auto chain = build_chain(config);
  const auto source = build_source(config);
  const auto factory = sim::make_twin_factory(config.sim, chain, source);
  const auto mode = rl::parse_action_mode(config.eval_mode);
  const double bound = rl::constraint_bound(config.trainer.cost_threshold, config.trainer.gamma);
  const auto res = rl::evaluate(rl::policy_selector(ck.policy, mode), factory, config.eval_episodes, config.seed,
                                config.trainer.gamma, bound);

  std::ostringstream ccdf;
  ccdf << "cost,ccdf\n";
  for (const auto& p : res.ccdf) ccdf << format_double(p.cost) << ',' << format_double(p.exceed_fraction) << '\n';
  std::ostringstream episodes;
  episodes << "episode,discounted_cost\n";
  for (std::size_t e = 0; e < res.discounted_costs.size(); ++e) {
    episodes << e << ',' << format_double(res.discounted_costs[e]) << '\n';
  }
  const double ccdf_bound = rl::ccdf_at(res.discounted_costs, bound);
  std::ostringstream summary;
  summary << "metric,value\n"
          << "episodes," << res.discounted_costs.size() << '\n'
          << "mode," << rl::action_mode_name(mode) << '\n'
          << "mean_packet_rate," << format_double(res.mean_packet_rate) << '\n'
          << "mean_error," << format_double(res.mean_error) << '\n'
          << "bound," << format_double(bound) << '\n'
          << "ccdf_at_bound," << format_double(ccdf_bound) << '\n'
          << "satisfied_fraction," << format_double(res.satisfied_fraction) << '\n';

  const fs::path dir = config.out_dir;
  write_file_atomic(dir / "evaluation.csv", ccdf.str());
  write_file_atomic(dir / "evaluation_episodes.csv", episodes.str());
  write_file_atomic(dir / "evaluation_summary.csv", summary.str());

  out << "mean packet rate: " << res.mean_packet_rate << " packets/s\n"
      << "mean error: " << res.mean_error << '\n'
      << "bound: " << bound << '\n'
      << "satisfied fraction: " << res.satisfied_fraction << " (1 - CCDF(bound) = " << 1.0 - ccdf_bound << ")\n";
  return 0;
}

int cmd_baseline(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto m = sim::run_baseline(config.sim, build_chain(config), build_source(config), config.seed);
  write_file_atomic(fs::path(config.out_dir) / "baseline_metrics.csv", sim::metrics_csv(m));
  out << "packet rate: " << m.packet_rate << " packets/s\n"
      << "mean cost: " << m.mean_cost << '\n'
      << "mean position error: " << m.mean_error << " m\n";
  return 0;
}

KincheckReport kincheck(const std::string& chain_name, std::uint64_t seed, std::size_t samples) {
  const auto chain = kin::builtin_chain(chain_name);
  if (!chain) throw ConfigError("unknown chain '" + chain_name + "' (expected panda7, panda5 or planar3)");
  KincheckReport rep;
  rep.chain = chain_name;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const auto n = static_cast<Eigen::Index>(chain->joint_count());
  const double h = 1e-6;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = angle(rng);
    const kin::Jacobian jac = kin::geometric_jacobian(*chain, q);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      const Eigen::Vector3d fd = (kin::forward_kinematics(*chain, qp).position -
                                  kin::forward_kinematics(*chain, qm).position) / (2 * h);
      rep.max_error = std::max(rep.max_error, (fd - jac.block<3, 1>(0, i)).cwiseAbs().maxCoeff());
    }
    if (chain_name == "planar3") {
      const Eigen::Vector3d lengths = kin::kDefaultPlanarLengths;
      const Eigen::Vector3d q3 = q.head<3>();
      const Eigen::Matrix3d pj = kin::planar3_jacobian(lengths, q3);
      rep.planar_rows_ok = rep.planar_rows_ok && pj.row(2) == Eigen::RowVector3d(1, 1, 1);
      for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d qp = q3, qm = q3;
        qp[i] += h;
        qm[i] -= h;
        const auto fp = kin::planar3_fk(lengths, qp);
        const auto fm = kin::planar3_fk(lengths, qm);
        const Eigen::Vector3d fd((fp.x - fm.x) / (2 * h), (fp.y - fm.y) / (2 * h), (fp.phi - fm.phi) / (2 * h));
        rep.max_error = std::max(rep.max_error, (fd - pj.col(i)).cwiseAbs().maxCoeff());
      }
    }
  }
  rep.pass = rep.max_error < 1e-5 && rep.planar_rows_ok;
  return rep;
}

int cmd_kincheck(const std::string& chain_name, std::uint64_t seed, std::ostream& out) {
  const auto rep = kincheck(chain_name, seed);
  out << "chain " << rep.chain << ": " << rep.samples << " random configurations, max |J - finite difference| = "
      << rep.max_error << '\n';
  if (rep.chain == "planar3") out << "planar third row (1,1,1): " << (rep.planar_rows_ok ? "yes" : "NO") << '\n';
  out << (rep.pass ? "PASS" : "FAIL") << '\n';
  return rep.pass ? 0 : 1;
}

}  // namespace crosstwin::app
