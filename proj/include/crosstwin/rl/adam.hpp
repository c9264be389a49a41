#pragma once

#include "crosstwin/rl/mlp.hpp"

namespace crosstwin::rl {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const LayerList& shape, AdamConfig config);

  // Descends along `grads`.
  void step(LayerList& params, const LayerList& grads);

  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  LayerList first_;
  LayerList second_;
  long steps_ = 0;
};

}  // namespace crosstwin::rl
