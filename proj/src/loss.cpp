#include "anorand/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anorand/errors.hpp"

namespace anorand {

double bce_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw DimensionError("bce_loss: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(target.size()) + " targets");
  }
  if (predicted.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double p = std::clamp(predicted[i], kProbabilityEps, 1.0 - kProbabilityEps);
    total -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(predicted.size());
}

double mae_loss(const Matrix& actual, const Matrix& reconstructed) {
  require_same_shape(actual, reconstructed, "mae_loss");
  if (actual.empty()) return 0.0;
  double total = 0.0;
  auto a = actual.values();
  auto b = reconstructed.values();
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

std::vector<double> row_mse(const Matrix& actual, const Matrix& reconstructed) {
  require_same_shape(actual, reconstructed, "row_mse");
  std::vector<double> out(actual.rows(), 0.0);
  const double inv_d = 1.0 / static_cast<double>(actual.cols());
  for (std::size_t r = 0; r < actual.rows(); ++r) {
    auto a = actual.row(r);
    auto b = reconstructed.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double diff = a[c] - b[c];
      acc += diff * diff;
    }
    out[r] = acc * inv_d;
  }
  return out;
}

}  // namespace anorand
