#pragma once

#include <cstddef>
#include <vector>

#include "anorand/matrix.hpp"

namespace anorand {

// Distance to the k-th nearest training row.
class KnnDetector {
 public:
  explicit KnnDetector(std::size_t k = 5);

  void fit(const Matrix& training);
  std::size_t k() const noexcept { return k_; }
  bool fitted() const noexcept { return !training_.empty(); }

  // Out-of-sample scores: every training row counts as a neighbour.
  std::vector<double> score(const Matrix& queries) const;
  // Scores of the training rows themselves, each excluding its own match.
  std::vector<double> score_training() const;

 private:
  std::vector<double> kth_distances(const Matrix& queries, bool exclude_self) const;

  std::size_t k_;
  Matrix training_;
};

// Squared distance between a row and its projection onto the span of the
// leading principal axes of the (centred) training data.
class PcaDetector {
 public:
  explicit PcaDetector(std::size_t n_components);

  void fit(const Matrix& training);
  std::size_t n_components() const noexcept { return n_components_; }
  // n_components x d; rows are orthonormal principal axes, largest variance first.
  const Matrix& axes() const noexcept { return axes_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& explained_variance() const noexcept { return variances_; }

  std::vector<double> score(const Matrix& queries) const;

 private:
  std::size_t n_components_;
  Matrix axes_;
  std::vector<double> means_;
  std::vector<double> variances_;
};

}  // namespace anorand
