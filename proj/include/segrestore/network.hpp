#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "segrestore/rng.hpp"

namespace segrestore {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Thrown when a computation produces non-finite values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { Sigmoid, Identity };

inline std::string_view activation_name(Activation a) {
  return a == Activation::Sigmoid ? "sigmoid" : "identity";
}

inline std::optional<Activation> parse_activation(std::string_view tag) {
  if (tag == "sigmoid") return Activation::Sigmoid;
  if (tag == "identity") return Activation::Identity;
  return std::nullopt;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

/// One fully connected layer: out = activation(weights * in + biases).
/// weights is out_dim x in_dim, biases has out_dim entries.
template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weights;
  VectorX<Scalar> biases;
  Activation activation = Activation::Sigmoid;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

/// Ordered dense layers; consecutive layers must agree on dimensions.
template <typename Scalar>
struct DenseNetwork {
  std::vector<DenseLayer<Scalar>> layers;

  Eigen::Index input_dim() const { return layers.front().in_dim(); }
  Eigen::Index output_dim() const { return layers.back().out_dim(); }

  /// Node counts per layer, e.g. {6, 12, 6, 12, 6}.
  std::vector<int> dims() const {
    std::vector<int> d;
    d.reserve(layers.size() + 1);
    d.push_back(static_cast<int>(layers.front().in_dim()));
    for (const auto& layer : layers) {
      d.push_back(static_cast<int>(layer.out_dim()));
    }
    return d;
  }
};

/// Per-parameter values with the same shapes as a network. Used both for
/// gradients and for optimizer velocity.
template <typename Scalar>
struct GradientSet {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> biases;
};

template <typename Scalar>
GradientSet<Scalar> zeros_like(const DenseNetwork<Scalar>& net) {
  GradientSet<Scalar> g;
  g.weights.reserve(net.layers.size());
  g.biases.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    g.weights.push_back(MatrixX<Scalar>::Zero(layer.out_dim(), layer.in_dim()));
    g.biases.push_back(VectorX<Scalar>::Zero(layer.out_dim()));
  }
  return g;
}

template <typename Scalar>
bool shapes_match(const DenseNetwork<Scalar>& net, const GradientSet<Scalar>& g) {
  if (g.weights.size() != net.layers.size() || g.biases.size() != net.layers.size()) {
    return false;
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (g.weights[l].rows() != net.layers[l].out_dim() ||
        g.weights[l].cols() != net.layers[l].in_dim() ||
        g.biases[l].size() != net.layers[l].out_dim()) {
      return false;
    }
  }
  return true;
}

/// Checks layer shapes and chaining. Throws std::invalid_argument on
/// violation.
template <typename Scalar>
void validate_shapes(const DenseNetwork<Scalar>& net) {
  if (net.layers.empty()) {
    throw std::invalid_argument("network: must have at least one layer");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (layer.in_dim() < 1 || layer.out_dim() < 1 ||
        layer.biases.size() != layer.out_dim()) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " has inconsistent shapes");
    }
    if (l > 0 && net.layers[l - 1].out_dim() != layer.in_dim()) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " input dim does not match previous output dim");
    }
  }
}

/// Shape checks plus the finiteness invariant on every parameter.
template <typename Scalar>
void validate_network(const DenseNetwork<Scalar>& net) {
  validate_shapes(net);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (!net.layers[l].weights.allFinite() || !net.layers[l].biases.allFinite()) {
      throw std::invalid_argument("network: layer " + std::to_string(l) +
                                  " contains non-finite parameters");
    }
  }
}

/// Builds a network with the given node counts. Weights are Xavier-uniform
/// in [-sqrt(6/(in+out)), +sqrt(6/(in+out))], drawn row-major per layer;
/// biases start at zero; every layer is sigmoid. Identical seeds yield
/// bit-identical networks.
template <typename Scalar = double>
DenseNetwork<Scalar> init_network(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) {
    throw std::invalid_argument("init_network: need at least two node counts");
  }
  for (int d : dims) {
    if (d < 1) {
      throw std::invalid_argument("init_network: node counts must be positive");
    }
  }
  rng::Engine eng(seed);
  DenseNetwork<Scalar> net;
  net.layers.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l];
    const int out = dims[l + 1];
    DenseLayer<Scalar> layer;
    layer.weights.resize(out, in);
    const double bound = std::sqrt(6.0 / (in + out));
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) {
        layer.weights(r, c) = static_cast<Scalar>(rng::uniform_in(eng, -bound, bound));
      }
    }
    layer.biases = VectorX<Scalar>::Zero(out);
    layer.activation = Activation::Sigmoid;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace detail {

template <typename Scalar>
void apply_activation_in_place(VectorX<Scalar>& z, Activation act) {
  if (act == Activation::Sigmoid) {
    z = z.unaryExpr([](Scalar v) { return sigmoid(v); });
  }
}

}  // namespace detail

/// Pure forward pass; rejects inputs whose length differs from the first
/// layer's input dimension. Accepts any vector expression with a matching
/// scalar type.
template <typename Scalar, typename Derived>
VectorX<Scalar> forward(const DenseNetwork<Scalar>& net,
                        const Eigen::MatrixBase<Derived>& input) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                "input scalar type must match the network");
  if (net.layers.empty()) {
    throw std::invalid_argument("forward: empty network");
  }
  if (input.size() != net.input_dim()) {
    throw std::invalid_argument(
        "forward: input length " + std::to_string(input.size()) +
        " does not match network input dim " + std::to_string(net.input_dim()));
  }
  VectorX<Scalar> a = input;
  for (const auto& layer : net.layers) {
    VectorX<Scalar> z = layer.weights * a + layer.biases;
    detail::apply_activation_in_place(z, layer.activation);
    a = std::move(z);
  }
  return a;
}

/// Mean squared error over all output components: (1/d) * sum((o - t)^2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar mse_loss(const Eigen::MatrixBase<DerivedA>& output,
                                   const Eigen::MatrixBase<DerivedB>& target) {
  using Scalar = typename DerivedA::Scalar;
  if (output.size() != target.size()) {
    throw std::invalid_argument("mse_loss: output/target length mismatch");
  }
  return (output - target).squaredNorm() / static_cast<Scalar>(output.size());
}

/// Reusable intermediate storage for backprop, so the training loop does not
/// reallocate per sample.
template <typename Scalar>
struct BackpropWorkspace {
  std::vector<VectorX<Scalar>> activations;  // a_0 .. a_L
  VectorX<Scalar> delta;
  VectorX<Scalar> delta_prev;
};

/// Analytic gradients of the MSE loss with respect to every weight and bias,
/// written into grads (resized if needed). Returns the loss. Throws
/// NumericalError if the loss is non-finite.
template <typename Scalar, typename DerivedX, typename DerivedT>
Scalar backprop(const DenseNetwork<Scalar>& net,
                const Eigen::MatrixBase<DerivedX>& input,
                const Eigen::MatrixBase<DerivedT>& target,
                GradientSet<Scalar>& grads, BackpropWorkspace<Scalar>& ws) {
  if (net.layers.empty()) {
    throw std::invalid_argument("backprop: empty network");
  }
  if (input.size() != net.input_dim()) {
    throw std::invalid_argument("backprop: input length does not match network");
  }
  if (target.size() != net.output_dim()) {
    throw std::invalid_argument("backprop: target length does not match network");
  }
  if (!shapes_match(net, grads)) {
    grads = zeros_like(net);
  }

  const std::size_t num_layers = net.layers.size();
  ws.activations.resize(num_layers + 1);
  ws.activations[0] = input;
  for (std::size_t l = 0; l < num_layers; ++l) {
    auto& z = ws.activations[l + 1];
    z.noalias() = net.layers[l].weights * ws.activations[l];
    z += net.layers[l].biases;
    detail::apply_activation_in_place(z, net.layers[l].activation);
  }

  const VectorX<Scalar>& output = ws.activations[num_layers];
  const Scalar loss = mse_loss(output, target);
  if (!std::isfinite(loss)) {
    throw NumericalError("backprop: non-finite loss");
  }

  // delta holds dLoss/dz for the layer being processed.
  ws.delta = (Scalar(2) / static_cast<Scalar>(output.size())) * (output - target);
  for (std::size_t l = num_layers; l-- > 0;) {
    const auto& a_out = ws.activations[l + 1];
    if (net.layers[l].activation == Activation::Sigmoid) {
      ws.delta.array() *= a_out.array() * (Scalar(1) - a_out.array());
    }
    grads.weights[l].noalias() = ws.delta * ws.activations[l].transpose();
    grads.biases[l] = ws.delta;
    if (l > 0) {
      ws.delta_prev.noalias() = net.layers[l].weights.transpose() * ws.delta;
      ws.delta.swap(ws.delta_prev);
    }
  }
  return loss;
}

template <typename Scalar, typename DerivedX, typename DerivedT>
std::pair<Scalar, GradientSet<Scalar>> backprop(
    const DenseNetwork<Scalar>& net, const Eigen::MatrixBase<DerivedX>& input,
    const Eigen::MatrixBase<DerivedT>& target) {
  GradientSet<Scalar> grads = zeros_like(net);
  BackpropWorkspace<Scalar> ws;
  const Scalar loss = backprop(net, input, target, grads, ws);
  return {loss, std::move(grads)};
}

/// Central finite-difference gradients, (loss(p+eps) - loss(p-eps)) / (2 eps)
/// for every parameter. Works on a copy, so the caller's network is untouched.
template <typename Scalar, typename DerivedX, typename DerivedT>
GradientSet<Scalar> numerical_gradient(const DenseNetwork<Scalar>& net,
                                       const Eigen::MatrixBase<DerivedX>& input,
                                       const Eigen::MatrixBase<DerivedT>& target,
                                       Scalar epsilon) {
  if (!(epsilon > Scalar(0))) {
    throw std::invalid_argument("numerical_gradient: epsilon must be > 0");
  }
  DenseNetwork<Scalar> probe = net;
  GradientSet<Scalar> grads = zeros_like(net);
  const auto loss_at = [&]() { return mse_loss(forward(probe, input), target); };
  const auto central_diff = [&](Scalar& param) {
    const Scalar saved = param;
    param = saved + epsilon;
    const Scalar plus = loss_at();
    param = saved - epsilon;
    const Scalar minus = loss_at();
    param = saved;
    return (plus - minus) / (Scalar(2) * epsilon);
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& layer = probe.layers[l];
    for (Eigen::Index r = 0; r < layer.out_dim(); ++r) {
      for (Eigen::Index c = 0; c < layer.in_dim(); ++c) {
        grads.weights[l](r, c) = central_diff(layer.weights(r, c));
      }
      grads.biases[l](r) = central_diff(layer.biases(r));
    }
  }
  return grads;
}

/// One SGD-with-momentum step, in place:
///   velocity <- momentum * velocity - lr * grad
///   parameter <- parameter + velocity
template <typename Scalar>
void apply_update(DenseNetwork<Scalar>& net, const GradientSet<Scalar>& grads,
                  GradientSet<Scalar>& velocity, Scalar lr, Scalar momentum) {
  if (!(lr > Scalar(0))) {
    throw std::invalid_argument("apply_update: learning rate must be > 0");
  }
  if (!(momentum >= Scalar(0) && momentum < Scalar(1))) {
    throw std::invalid_argument("apply_update: momentum must be in [0, 1)");
  }
  if (!shapes_match(net, grads) || !shapes_match(net, velocity)) {
    throw std::invalid_argument("apply_update: gradient/velocity shape mismatch");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    velocity.weights[l] = momentum * velocity.weights[l] - lr * grads.weights[l];
    net.layers[l].weights += velocity.weights[l];
    velocity.biases[l] = momentum * velocity.biases[l] - lr * grads.biases[l];
    net.layers[l].biases += velocity.biases[l];
  }
}

}  // namespace segrestore
