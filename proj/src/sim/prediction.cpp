#include "crosstwin/sim/prediction.hpp"

#include <algorithm>

#include "crosstwin/errors.hpp"

namespace crosstwin::sim {

std::vector<double> predict(std::span<const double> history, PredictorKind kind, std::size_t horizon,
                            std::size_t fit_window) {
  if (history.empty()) throw EmptyInputError("prediction needs at least one history value");
  const double last = history.back();
  std::vector<double> out(horizon, last);
  const std::size_t m = std::min(history.size(), fit_window);
  if (kind == PredictorKind::hold_last || m < 2) return out;

  // Least-squares line over x = -(m-1) .. 0, evaluated at x = h.
  const auto tail = history.subspan(history.size() - m);
  const double xm = -0.5 * static_cast<double>(m - 1);
  double ym = 0.0;
  for (double y : tail) ym += y;
  ym /= static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = static_cast<double>(k) - static_cast<double>(m - 1) - xm;
    sxy += dx * (tail[k] - ym);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  for (std::size_t h = 1; h <= horizon; ++h) out[h - 1] = ym + slope * (static_cast<double>(h) - xm);
  return out;
}

double prediction_mse(std::span<const double> forecast, std::span<const double> truth) {
  if (forecast.size() != truth.size()) throw DimensionError("forecast and truth differ in length");
  if (forecast.empty()) throw EmptyInputError("mse of empty sequences");
  double s = 0.0;
  for (std::size_t k = 0; k < forecast.size(); ++k) {
    const double d = forecast[k] - truth[k];
    s += d * d;
  }
  return s / static_cast<double>(forecast.size());
}

}  // namespace crosstwin::sim
