#pragma once

#include <span>

namespace crosstwin::rl {

/// Rockafellar-Uryasev CVaR state. `worst_fraction` is the tail mass being
/// averaged (0.05 for a 95% confidence level).
struct CVaRTracker {
  double threshold = 0.0;
  double worst_fraction = 0.05;
  double step_size = 2e-3;
  int iterations = 500;

  void validate() const;
};

/// v + mean((s - v)^+) / worst_fraction. Minimized over v this is the mean of
/// the worst `worst_fraction` of the samples.
double cvar_estimate(std::span<const double> samples, double v, double worst_fraction);

/// Runs `iterations` sub-gradient steps on the threshold and returns it.
/// At ties the least-magnitude subgradient is used.
double cvar_update(CVaRTracker& tracker, std::span<const double> samples);

/// Exact empirical CVaR by sorting (fractional weight on the boundary sample).
double empirical_cvar(std::span<const double> samples, double worst_fraction);

}  // namespace crosstwin::rl
