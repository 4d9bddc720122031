#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdprune/mask.hpp"
#include "cdprune/types.hpp"

namespace cdprune {

enum class Activation { relu, identity };

struct DenseLayer {
  Matrix W;   // [in_dim x out_dim]
  RowVector b;
  Matrix W0;  // frozen initial weights
  Activation activation = Activation::relu;

  int in_dim() const { return static_cast<int>(W.rows()); }
  int out_dim() const { return static_cast<int>(W.cols()); }
};

/// Dense feedforward classifier ending in a two-logit head.
class Network {
 public:
  Network() = default;
  Network(std::vector<DenseLayer> layers, std::uint64_t seed);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<int> layer_dims() const;
  /// Number of weights, biases excluded.
  std::size_t param_count() const;

 private:
  std::vector<DenseLayer> layers_;
  std::uint64_t seed_ = 0;
};

/// Rows of X with their class labels.
struct Batch {
  Matrix X;
  Labels y;

  /// Throws ContractError on NaN/Inf features, bad labels or size mismatch.
  void validate() const;
};

struct Gradients {
  std::vector<Matrix> dW;
  std::vector<RowVector> db;
  // Reused between calls; not part of the result.
  std::vector<Matrix> delta, upstream;
};

/// Heavy-ball velocity buffers, shaped like the parameters.
struct MomentumState {
  std::vector<Matrix> vW;
  std::vector<RowVector> vb;

  static MomentumState zeros(const Network& net);
  void reset();
};

/// Per-layer activations kept from a forward pass for backpropagation.
struct ForwardTrace {
  std::vector<Matrix> inputs;     // input of each layer
  std::vector<Matrix> pre;        // pre-activation of each layer
  std::vector<Matrix> effective;  // mask (.) W of each layer
  Matrix logits;
};

/// Weights ~ U(-1/sqrt(in_dim), 1/sqrt(in_dim)), biases zero, W0 = W.
Network init_network(std::span<const int> layer_dims, std::uint64_t seed);

Matrix forward(const Network& net, const PruneMask& mask, const Matrix& X);
ForwardTrace forward_trace(const Network& net, const PruneMask& mask, const Matrix& X);
/// Same as above, reusing the storage already held by `trace`.
void forward_trace(const Network& net, const PruneMask& mask, const Matrix& X, ForwardTrace& trace);

/// Exact gradients of the loss whose logit-gradient is `loss_grad_on_logits`.
/// Weight gradients are gated by the mask.
Gradients backward(const Network& net, const PruneMask& mask, const ForwardTrace& trace,
                   const Matrix& loss_grad_on_logits);
Gradients backward(const Network& net, const PruneMask& mask, const Batch& batch,
                   const Matrix& loss_grad_on_logits);
void backward(const Network& net, const PruneMask& mask, const ForwardTrace& trace,
              const Matrix& loss_grad_on_logits, Gradients& grads);

/// v := momentum * v + g;  theta := theta - lr * v.
void sgd_step(Network& net, const Gradients& grads, MomentumState& state, double lr,
              double momentum);

}  // namespace cdprune
