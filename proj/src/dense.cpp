#include "anorand/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anorand/errors.hpp"

namespace anorand {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  throw ParseError("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void apply_activation(Activation a, std::span<double> values) {
  switch (a) {
    case Activation::kRelu:
      for (double& v : values) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::kSigmoid:
      for (double& v : values) v = sigmoid(v);
      break;
    case Activation::kIdentity:
      break;
  }
}

DenseLayer::DenseLayer(Matrix weight, std::vector<double> bias, Activation activation)
    : weight_(std::move(weight)), bias_(std::move(bias)), activation_(activation) {
  if (weight_.rows() == 0 || weight_.cols() == 0) {
    throw ArgumentError("dense layer needs non-zero fan_in and fan_out");
  }
  if (bias_.size() != weight_.cols()) {
    throw DimensionError("dense layer bias length " + std::to_string(bias_.size()) +
                         " does not match weight " + weight_.shape_string());
  }
}

Matrix DenseLayer::affine(const Matrix& input) const {
  if (input.cols() != fan_in()) {
    throw DimensionError("dense forward: input " + input.shape_string() + " vs weight " +
                         weight_.shape_string());
  }
  Matrix out = matmul(input, weight_);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias_[c];
  }
  return out;
}

Matrix DenseLayer::forward(const Matrix& input) {
  Matrix pre = affine(input);
  Matrix out = pre;
  apply_activation(activation_, out.values());
  cached_input_ = input;
  cached_pre_ = std::move(pre);
  return out;
}

Matrix DenseLayer::apply(const Matrix& input) const {
  Matrix out = affine(input);
  apply_activation(activation_, out.values());
  return out;
}

const Matrix& DenseLayer::last_preactivation() const {
  if (!cached_pre_) throw StateError("dense layer has no cached forward pass");
  return *cached_pre_;
}

DenseGrads DenseLayer::backward(const Matrix& upstream, bool input_grad) const {
  if (!cached_pre_) throw StateError("dense backward called before forward");
  require_same_shape(upstream, *cached_pre_, "dense backward upstream");
  Matrix grad_pre = upstream;
  auto g = grad_pre.values();
  auto z = cached_pre_->values();
  switch (activation_) {
    case Activation::kRelu:
      for (std::size_t i = 0; i < g.size(); ++i)
        if (z[i] <= 0.0) g[i] = 0.0;
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = sigmoid(z[i]);
        g[i] *= s * (1.0 - s);
      }
      break;
    case Activation::kIdentity:
      break;
  }
  return backward_preactivation(grad_pre, input_grad);
}

DenseGrads DenseLayer::backward_preactivation(const Matrix& upstream, bool input_grad) const {
  if (!cached_input_) throw StateError("dense backward called before forward");
  if (upstream.rows() != cached_input_->rows() || upstream.cols() != fan_out()) {
    throw DimensionError("dense backward: upstream " + upstream.shape_string() +
                         " vs expected (" + std::to_string(cached_input_->rows()) + "x" +
                         std::to_string(fan_out()) + ")");
  }
  DenseGrads grads{matmul_transpose_a(*cached_input_, upstream),
                   std::vector<double>(fan_out(), 0.0),
                   input_grad ? matmul_transpose_b(upstream, weight_) : Matrix()};
  for (std::size_t r = 0; r < upstream.rows(); ++r) {
    auto row = upstream.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) grads.bias[c] += row[c];
  }
  return grads;
}

DenseLayer init_layer(Rng& rng, std::size_t fan_in, std::size_t fan_out, Activation activation) {
  if (fan_in == 0 || fan_out == 0) {
    throw ArgumentError("init_layer: fan_in and fan_out must be >= 1 (got " +
                        std::to_string(fan_in) + ", " + std::to_string(fan_out) + ")");
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
  return DenseLayer(std::move(w), std::vector<double>(fan_out, 0.0), activation);
}

}  // namespace anorand
