#include "cdprune/nn.hpp"

#include <cmath>
#include <string>

#include "cdprune/errors.hpp"
#include "cdprune/rng.hpp"

namespace cdprune {

namespace {

void require_mask(const Network& net, const PruneMask& mask) {
  if (!mask.matches(net)) throw ContractError("mask shape does not match network");
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

Network::Network(std::vector<DenseLayer> layers, std::uint64_t seed)
    : layers_(std::move(layers)), seed_(seed) {
  if (layers_.empty()) throw InvalidArchitecture("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.W.rows() != layer.W0.rows() || layer.W.cols() != layer.W0.cols()) {
      throw InvalidArchitecture("W and W0 shapes differ in layer " + std::to_string(l));
    }
    if (layer.b.size() != layer.W.cols()) {
      throw InvalidArchitecture("bias size mismatch in layer " + std::to_string(l));
    }
    if (l > 0 && layers_[l - 1].out_dim() != layer.in_dim()) {
      throw InvalidArchitecture("layer " + std::to_string(l) + " input does not match previous output");
    }
  }
  if (layers_.back().out_dim() != 2) throw InvalidArchitecture("final layer must have 2 outputs");
}

std::vector<int> Network::layer_dims() const {
  std::vector<int> dims;
  if (layers_.empty()) return dims;
  dims.push_back(layers_.front().in_dim());
  for (const auto& layer : layers_) dims.push_back(layer.out_dim());
  return dims;
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.W.size());
  return n;
}

void Batch::validate() const {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ContractError("batch has " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(y.size()) + " labels");
  }
  if (!X.allFinite()) throw ContractError("batch features contain NaN or Inf");
  for (int label : y) {
    if (label != kNegative && label != kPositive) throw ContractError("labels must be 0 or 1");
  }
}

MomentumState MomentumState::zeros(const Network& net) {
  MomentumState state;
  for (const auto& layer : net.layers()) {
    state.vW.push_back(Matrix::Zero(layer.W.rows(), layer.W.cols()));
    state.vb.push_back(RowVector::Zero(layer.b.size()));
  }
  return state;
}

void MomentumState::reset() {
  for (auto& v : vW) v.setZero();
  for (auto& v : vb) v.setZero();
}

Network init_network(std::span<const int> layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw InvalidArchitecture("need at least input and output dimensions");
  for (int d : layer_dims) {
    if (d < 1) throw InvalidArchitecture("layer dimensions must be >= 1");
  }
  if (layer_dims.back() != 2) throw InvalidArchitecture("last dimension must be 2");

  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int in = layer_dims[l];
    const int out = layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer;
    layer.W.resize(in, out);
    for (Eigen::Index i = 0; i < layer.W.size(); ++i) {
      layer.W.data()[i] = rng.uniform(-bound, bound);
    }
    layer.b = RowVector::Zero(out);
    layer.W0 = layer.W;
    layer.activation = (l + 2 == layer_dims.size()) ? Activation::identity : Activation::relu;
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers), seed);
}

void forward_trace(const Network& net, const PruneMask& mask, const Matrix& X,
                   ForwardTrace& trace) {
  require_mask(net, mask);
  const auto& layers = net.layers();
  if (X.cols() != layers.front().in_dim()) {
    throw ContractError("input has " + std::to_string(X.cols()) + " features, network expects " +
                        std::to_string(layers.front().in_dim()));
  }
  const std::size_t depth = layers.size();
  trace.inputs.resize(depth);
  trace.pre.resize(depth);
  trace.effective.resize(depth);
  trace.inputs[0] = X;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = layers[l];
    trace.effective[l] = layer.W.cwiseProduct(mask.layers[l]);
    Matrix& pre = trace.pre[l];
    pre.resize(X.rows(), layer.out_dim());
    pre.noalias() = trace.inputs[l] * trace.effective[l];
    pre.rowwise() += layer.b;
    Matrix& out = (l + 1 < depth) ? trace.inputs[l + 1] : trace.logits;
    if (layer.activation == Activation::relu) {
      out = pre.cwiseMax(0.0);
    } else {
      out = pre;
    }
  }
}

ForwardTrace forward_trace(const Network& net, const PruneMask& mask, const Matrix& X) {
  ForwardTrace trace;
  forward_trace(net, mask, X, trace);
  return trace;
}

Matrix forward(const Network& net, const PruneMask& mask, const Matrix& X) {
  return forward_trace(net, mask, X).logits;
}

void backward(const Network& net, const PruneMask& mask, const ForwardTrace& trace,
              const Matrix& loss_grad_on_logits, Gradients& grads) {
  require_mask(net, mask);
  const auto& layers = net.layers();
  const Eigen::Index n = trace.logits.rows();
  if (loss_grad_on_logits.rows() != n || loss_grad_on_logits.cols() != 2) {
    throw ContractError("logit gradient must be [n x 2]");
  }
  if (trace.pre.size() != layers.size()) throw ContractError("trace does not match network");
  grads.dW.resize(layers.size());
  grads.db.resize(layers.size());

  grads.delta.resize(layers.size());
  grads.upstream.resize(layers.size());
  // upstream[l] = dL/d(output of layer l), delta[l] = dL/d(pre-activation of layer l)
  grads.upstream.back() = loss_grad_on_logits;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    Matrix& delta = grads.delta[l];
    if (layer.activation == Activation::relu) {
      delta = (trace.pre[l].array() > 0.0).select(grads.upstream[l], 0.0);
    } else {
      delta = grads.upstream[l];
    }
    grads.dW[l].resize(layer.in_dim(), layer.out_dim());
    grads.dW[l].noalias() = trace.inputs[l].transpose() * delta;
    grads.dW[l].array() *= mask.layers[l].array();
    grads.db[l] = delta.colwise().sum();
    if (l > 0) {
      grads.upstream[l - 1].resize(n, layer.in_dim());
      grads.upstream[l - 1].noalias() = delta * trace.effective[l].transpose();
    }
  }
}

Gradients backward(const Network& net, const PruneMask& mask, const ForwardTrace& trace,
                   const Matrix& loss_grad_on_logits) {
  Gradients grads;
  backward(net, mask, trace, loss_grad_on_logits, grads);
  return grads;
}

Gradients backward(const Network& net, const PruneMask& mask, const Batch& batch,
                   const Matrix& loss_grad_on_logits) {
  if (static_cast<std::size_t>(batch.X.rows()) != batch.y.size()) {
    throw ContractError("batch rows and labels disagree");
  }
  return backward(net, mask, forward_trace(net, mask, batch.X), loss_grad_on_logits);
}

void sgd_step(Network& net, const Gradients& grads, MomentumState& state, double lr,
              double momentum) {
  if (!(lr > 0.0)) throw ContractError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ContractError("momentum must be in [0, 1)");
  auto& layers = net.layers();
  if (grads.dW.size() != layers.size() || state.vW.size() != layers.size()) {
    throw ContractError("gradient/state layer count mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!all_finite(grads.dW[l]) || !grads.db[l].allFinite()) {
      throw NumericFault("non-finite gradient in layer " + std::to_string(l));
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    state.vW[l] = momentum * state.vW[l] + grads.dW[l];
    state.vb[l] = momentum * state.vb[l] + grads.db[l];
    layer.W -= lr * state.vW[l];
    layer.b -= lr * state.vb[l];
  }
}

}  // namespace cdprune
