#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace anorand {

struct AdamHyperparams {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter tensor.
struct AdamState {
  explicit AdamState(std::size_t size, AdamHyperparams hyper = {});

  AdamHyperparams hyper;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

// Bias-corrected Adam update, in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace anorand
