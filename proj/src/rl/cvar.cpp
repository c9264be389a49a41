#include "crosstwin/rl/cvar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

void CVaRTracker::validate() const {
  if (!(worst_fraction > 0.0 && worst_fraction < 1.0)) throw ValidityError("CVaR worst fraction must lie in (0, 1)");
  if (!(step_size > 0.0)) throw ValidityError("CVaR step size must be positive");
  if (iterations < 1) throw ValidityError("CVaR iteration count must be at least 1");
}

double cvar_estimate(std::span<const double> samples, double v, double worst_fraction) {
  if (samples.empty()) throw EmptyInputError("CVaR of an empty sample set");
  double excess = 0.0;
  for (double s : samples) excess += std::max(s - v, 0.0);
  return v + excess / (static_cast<double>(samples.size()) * worst_fraction);
}

double cvar_update(CVaRTracker& tracker, std::span<const double> samples) {
  tracker.validate();
  if (samples.empty()) throw EmptyInputError("CVaR update on an empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double v = tracker.threshold;
  const double scale = 1.0 / (n * tracker.worst_fraction);
  for (int k = 0; k < tracker.iterations; ++k) {
    // Samples tied with v make the objective kinked there; take the
    // subgradient of least magnitude so a minimizer stays put.
    const auto first_tied = std::lower_bound(sorted.begin(), sorted.end(), v);
    const auto first_above = std::upper_bound(first_tied, sorted.end(), v);
    const double hi = 1.0 - static_cast<double>(sorted.end() - first_above) * scale;
    const double lo = 1.0 - static_cast<double>(sorted.end() - first_tied) * scale;
    v -= tracker.step_size * std::clamp(0.0, lo, hi);
  }
  tracker.threshold = v;
  return v;
}

double empirical_cvar(std::span<const double> samples, double worst_fraction) {
  if (samples.empty()) throw EmptyInputError("CVaR of an empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double mass = worst_fraction * static_cast<double>(sorted.size());
  double taken = 0.0;
  double total = 0.0;
  for (double s : sorted) {
    const double w = std::min(1.0, mass - taken);
    if (w <= 0.0) break;
    total += w * s;
    taken += w;
  }
  return total / mass;
}

}  // namespace crosstwin::rl
