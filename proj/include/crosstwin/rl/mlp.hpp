#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace crosstwin::rl {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  static DenseLayer zeros_like(const DenseLayer& other);
  std::size_t size() const { return static_cast<std::size_t>(weight.size() + bias.size()); }
};

using LayerList = std::vector<DenseLayer>;

struct ForwardCache {
  // activations[0] is the input, activations[k] the output of layer k.
  std::vector<Eigen::MatrixXd> activations;
};

/// Runs a stack of dense layers. Every layer but the last applies tanh; the
/// last one does too when `activate_last` is set.
Eigen::MatrixXd forward_layers(std::span<const DenseLayer> layers, const Eigen::MatrixXd& input,
                               bool activate_last, ForwardCache* cache);

/// Backpropagates `grad_output` through the stack, accumulating into `grads`
/// (same layout as `layers`). Returns the gradient with respect to the input.
Eigen::MatrixXd backward_layers(std::span<const DenseLayer> layers, const ForwardCache& cache,
                                const Eigen::MatrixXd& grad_output, bool activate_last,
                                std::span<DenseLayer> grads);

/// Fully connected network with tanh hidden units. Inputs and outputs are
/// column-major batches (features x batch).
class Mlp {
 public:
  using Cache = ForwardCache;

  Mlp() = default;
  Mlp(const std::vector<std::size_t>& sizes, bool activate_output);

  /// Orthogonal initialization; hidden layers use `hidden_gain`, the last layer `output_gain`.
  void initialize(std::mt19937_64& rng, double hidden_gain, double output_gain);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients into `grads` and returns d(loss)/d(input).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_output, LayerList& grads) const;

  LayerList& layers() { return layers_; }
  const LayerList& layers() const { return layers_; }
  LayerList zero_gradients() const;

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t parameter_count() const;
  bool activates_output() const { return activate_output_; }

 private:
  LayerList layers_;
  bool activate_output_ = false;
};

/// Matrix with orthonormal rows or columns scaled by `gain`.
Eigen::MatrixXd orthogonal_matrix(std::size_t rows, std::size_t cols, double gain, std::mt19937_64& rng);

Eigen::VectorXd flatten(const LayerList& layers);
void unflatten(const Eigen::VectorXd& flat, LayerList& layers);
double squared_norm(const LayerList& layers);
void scale(LayerList& layers, double factor);
bool all_finite(const LayerList& layers);

}  // namespace crosstwin::rl
