#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "anorand/matrix.hpp"
#include "anorand/rng.hpp"

namespace anorand {

enum class Activation { kRelu, kSigmoid, kIdentity };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

double sigmoid(double x) noexcept;

struct DenseGrads {
  Matrix weight;             // fan_in x fan_out
  std::vector<double> bias;  // fan_out
  Matrix input;              // batch x fan_in
};

// Fully connected layer: out = act(in · W + b).
//
// forward() caches the input and pre-activation of the last batch so that a
// following backward() can produce gradients. Parameters only change through
// the mutable accessors (used by the optimizer and by checkpoint loading).
class DenseLayer {
 public:
  DenseLayer(Matrix weight, std::vector<double> bias, Activation activation);

  std::size_t fan_in() const noexcept { return weight_.rows(); }
  std::size_t fan_out() const noexcept { return weight_.cols(); }
  Activation activation() const noexcept { return activation_; }
  std::size_t parameter_count() const noexcept { return weight_.size() + bias_.size(); }

  const Matrix& weight() const noexcept { return weight_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  std::span<double> weight_values() noexcept { return weight_.values(); }
  std::span<double> bias_values() noexcept { return bias_; }

  // Forward pass that records the cache for backward().
  Matrix forward(const Matrix& input);
  // Forward pass without touching the cache.
  Matrix apply(const Matrix& input) const;
  const Matrix& last_preactivation() const;

  // Gradients given dL/d(output).
  // With `input_grad` false the (possibly costly) input gradient is left empty.
  DenseGrads backward(const Matrix& upstream, bool input_grad = true) const;
  // Gradients given dL/d(pre-activation); skips the activation derivative.
  // Used where the loss gradient is simpler in logit space (sigmoid + BCE).
  DenseGrads backward_preactivation(const Matrix& upstream, bool input_grad = true) const;

 private:
  Matrix affine(const Matrix& input) const;

  Matrix weight_;
  std::vector<double> bias_;
  Activation activation_;
  std::optional<Matrix> cached_input_;
  std::optional<Matrix> cached_pre_;
};

// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)), zero bias.
DenseLayer init_layer(Rng& rng, std::size_t fan_in, std::size_t fan_out, Activation activation);

// Elementwise activation.
void apply_activation(Activation a, std::span<double> values);

}  // namespace anorand
