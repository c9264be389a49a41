#include "crosstwin/rl/evaluate.hpp"

#include <algorithm>
#include <string>

#include "crosstwin/errors.hpp"
#include "crosstwin/rl/trainer.hpp"

namespace crosstwin::rl {

ActionMode parse_action_mode(std::string_view text) {
  if (text == "greedy") return ActionMode::greedy;
  if (text == "sample") return ActionMode::sample;
  throw ConfigError("unknown action mode '" + std::string(text) + "' (expected greedy or sample)");
}

std::string_view action_mode_name(ActionMode mode) { return mode == ActionMode::greedy ? "greedy" : "sample"; }

ActionSelector policy_selector(const TwoBranchPolicy& policy, ActionMode mode) {
  return [&policy, mode](const Eigen::VectorXd& obs, std::mt19937_64& rng) {
    const auto dist = policy.forward(obs);
    return mode == ActionMode::greedy ? greedy_action(dist).action : sample_action(dist, rng).action;
  };
}

double ccdf_at(const std::vector<double>& samples, double x) {
  if (samples.empty()) throw EmptyInputError("ccdf of an empty sample set");
  const auto above = std::count_if(samples.begin(), samples.end(), [x](double s) { return s > x; });
  return static_cast<double>(above) / static_cast<double>(samples.size());
}

std::vector<CcdfPoint> ccdf_table(std::vector<double> samples) {
  if (samples.empty()) throw EmptyInputError("ccdf of an empty sample set");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(samples.size() - i - 1) / n});
  }
  return out;
}

EvaluationResult evaluate(const ActionSelector& select, const EnvironmentFactory& factory, std::size_t episodes,
                          std::uint64_t seed, double gamma, double bound) {
  if (episodes == 0) throw EmptyInputError("evaluation needs at least one episode");
  auto env = factory();
  std::mt19937_64 rng(mix_seed(seed, 0xE7A1));
  EvaluationResult out;
  out.bound = bound;
  double packets = 0.0;
  double cost_sum = 0.0;
  std::size_t steps = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    Eigen::VectorXd obs = env->reset(mix_seed(seed, (1ULL << 40) + e));
    double discounted = 0.0;
    double weight = 1.0;
    for (;;) {
      const Transition tr = env->step(select(obs, rng));
      discounted += weight * tr.cost;
      weight *= gamma;
      packets += tr.packets;
      cost_sum += tr.cost;
      ++steps;
      obs = tr.observation;
      if (tr.done) break;
    }
    out.discounted_costs.push_back(discounted);
  }
  out.mean_packet_rate = packets / (static_cast<double>(steps) * env->slot_seconds());
  out.mean_error = cost_sum / static_cast<double>(steps);
  out.ccdf = ccdf_table(out.discounted_costs);
  out.satisfied_fraction = 1.0 - ccdf_at(out.discounted_costs, bound);
  return out;
}

}  // namespace crosstwin::rl
