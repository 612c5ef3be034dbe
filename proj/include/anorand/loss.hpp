#pragma once

#include <span>

#include "anorand/matrix.hpp"

namespace anorand {

// Probabilities are clamped into [kProbabilityEps, 1 - kProbabilityEps]
// before taking logarithms.
inline constexpr double kProbabilityEps = 1e-12;

// Mean binary cross-entropy over the batch.
double bce_loss(std::span<const double> predicted, std::span<const double> target);

// Mean absolute error over every entry.
double mae_loss(const Matrix& actual, const Matrix& reconstructed);

// Per-row mean squared difference across columns.
std::vector<double> row_mse(const Matrix& actual, const Matrix& reconstructed);

}  // namespace anorand
