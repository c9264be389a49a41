#include "crosstwin/rl/adam.hpp"

#include <cmath>

namespace crosstwin::rl {

Adam::Adam(const LayerList& shape, AdamConfig config) : config_(config) {
  for (const auto& layer : shape) {
    first_.push_back(DenseLayer::zeros_like(layer));
    second_.push_back(DenseLayer::zeros_like(layer));
  }
}

void Adam::step(LayerList& params, const LayerList& grads) {
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;

  auto apply = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t k = 0; k < params.size(); ++k) {
    apply(params[k].weight, grads[k].weight, first_[k].weight, second_[k].weight);
    apply(params[k].bias, grads[k].bias, first_[k].bias, second_[k].bias);
  }
}

}  // namespace crosstwin::rl
