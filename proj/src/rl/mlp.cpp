#include "crosstwin/rl/mlp.hpp"

#include <cmath>

#include "crosstwin/errors.hpp"

namespace crosstwin::rl {

DenseLayer DenseLayer::zeros_like(const DenseLayer& other) {
  return {Eigen::MatrixXd::Zero(other.weight.rows(), other.weight.cols()),
          Eigen::VectorXd::Zero(other.bias.size())};
}

Eigen::MatrixXd forward_layers(std::span<const DenseLayer> layers, const Eigen::MatrixXd& input,
                               bool activate_last, ForwardCache* cache) {
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(layers.size() + 1);
    cache->activations.push_back(input);
  }
  Eigen::MatrixXd x = input;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (x.rows() != layer.weight.cols()) {
      throw DimensionError("layer input has " + std::to_string(x.rows()) + " features, expected " +
                           std::to_string(layer.weight.cols()));
    }
    Eigen::MatrixXd z = layer.weight * x;
    z.colwise() += layer.bias;
    if (k + 1 < layers.size() || activate_last) {
      z = z.array().tanh().matrix();
    }
    x = std::move(z);
    if (cache) cache->activations.push_back(x);
  }
  return x;
}

Eigen::MatrixXd backward_layers(std::span<const DenseLayer> layers, const ForwardCache& cache,
                                const Eigen::MatrixXd& grad_output, bool activate_last,
                                std::span<DenseLayer> grads) {
  Eigen::MatrixXd delta = grad_output;
  for (std::size_t k = layers.size(); k-- > 0;) {
    const Eigen::MatrixXd& out = cache.activations[k + 1];
    if (k + 1 < layers.size() || activate_last) {
      delta = (delta.array() * (1.0 - out.array().square())).matrix();
    }
    const Eigen::MatrixXd& in = cache.activations[k];
    grads[k].weight.noalias() += delta * in.transpose();
    grads[k].bias += delta.rowwise().sum();
    delta = layers[k].weight.transpose() * delta;
  }
  return delta;
}

Mlp::Mlp(const std::vector<std::size_t>& sizes, bool activate_output) : activate_output_(activate_output) {
  if (sizes.size() < 2) {
    throw DimensionError("an MLP needs at least an input and an output size");
  }
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const auto out = static_cast<Eigen::Index>(sizes[k + 1]);
    const auto in = static_cast<Eigen::Index>(sizes[k]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
}

void Mlp::initialize(std::mt19937_64& rng, double hidden_gain, double output_gain) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    auto& layer = layers_[k];
    const double gain = (k + 1 == layers_.size()) ? output_gain : hidden_gain;
    layer.weight = orthogonal_matrix(static_cast<std::size_t>(layer.weight.rows()),
                                     static_cast<std::size_t>(layer.weight.cols()), gain, rng);
    layer.bias.setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache* cache) const {
  return forward_layers(layers_, input, activate_output_, cache);
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_output, LayerList& grads) const {
  return backward_layers(layers_, cache, grad_output, activate_output_, grads);
}

LayerList Mlp::zero_gradients() const {
  LayerList grads;
  grads.reserve(layers_.size());
  for (const auto& layer : layers_) grads.push_back(DenseLayer::zeros_like(layer));
  return grads;
}

std::size_t Mlp::input_size() const { return static_cast<std::size_t>(layers_.front().weight.cols()); }
std::size_t Mlp::output_size() const { return static_cast<std::size_t>(layers_.back().weight.rows()); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

Eigen::MatrixXd orthogonal_matrix(std::size_t rows, std::size_t cols, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t big = std::max(rows, cols);
  const std::size_t small = std::min(rows, cols);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(small));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  // Sign fix so the distribution is uniform over orthogonal matrices.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Eigen::MatrixXd out = (rows >= cols) ? q : Eigen::MatrixXd(q.transpose());
  return gain * out;
}

Eigen::VectorXd flatten(const LayerList& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.size();
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n));
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    flat.segment(at, l.weight.size()) = l.weight.reshaped();
    at += l.weight.size();
    flat.segment(at, l.bias.size()) = l.bias;
    at += l.bias.size();
  }
  return flat;
}

void unflatten(const Eigen::VectorXd& flat, LayerList& layers) {
  Eigen::Index at = 0;
  for (auto& l : layers) {
    l.weight.reshaped() = flat.segment(at, l.weight.size());
    at += l.weight.size();
    l.bias = flat.segment(at, l.bias.size());
    at += l.bias.size();
  }
  if (at != flat.size()) {
    throw DimensionError("flat parameter vector does not match layer shapes");
  }
}

double squared_norm(const LayerList& layers) {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

void scale(LayerList& layers, double factor) {
  for (auto& l : layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

bool all_finite(const LayerList& layers) {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

}  // namespace crosstwin::rl
