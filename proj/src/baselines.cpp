#include "anorand/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "anorand/errors.hpp"

namespace anorand {

KnnDetector::KnnDetector(std::size_t k) : k_(k) {
  if (k_ == 0) throw ArgumentError("KNN k must be >= 1");
}

void KnnDetector::fit(const Matrix& training) {
  if (k_ >= training.rows()) {
    throw ArgumentError("KNN k (" + std::to_string(k_) + ") must be smaller than the " +
                        std::to_string(training.rows()) + " training rows");
  }
  training_ = training;
}

std::vector<double> KnnDetector::kth_distances(const Matrix& queries, bool exclude_self) const {
  if (!fitted()) throw StateError("KNN detector used before fit");
  if (queries.cols() != training_.cols()) {
    throw DimensionError("KNN query " + queries.shape_string() + " vs training " +
                         training_.shape_string());
  }
  const std::size_t n_train = training_.rows();
  std::vector<double> out(queries.rows());
  std::vector<double> dist;
  dist.reserve(n_train);
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    dist.clear();
    auto a = queries.row(q);
    for (std::size_t t = 0; t < n_train; ++t) {
      if (exclude_self && t == q) continue;
      auto b = training_.row(t);
      double acc = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        acc += diff * diff;
      }
      dist.push_back(acc);
    }
    auto kth = dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1);
    std::nth_element(dist.begin(), kth, dist.end());
    out[q] = std::sqrt(*kth);
  }
  return out;
}

std::vector<double> KnnDetector::score(const Matrix& queries) const {
  return kth_distances(queries, false);
}

std::vector<double> KnnDetector::score_training() const { return kth_distances(training_, true); }

PcaDetector::PcaDetector(std::size_t n_components) : n_components_(n_components) {
  if (n_components_ == 0) throw ArgumentError("PCA n_components must be >= 1");
}

void PcaDetector::fit(const Matrix& training) {
  const std::size_t n = training.rows();
  const std::size_t d = training.cols();
  if (n_components_ > d) {
    throw ArgumentError("PCA n_components (" + std::to_string(n_components_) +
                        ") exceeds the feature count (" + std::to_string(d) + ")");
  }
  if (n == 0) throw ArgumentError("PCA fit on an empty matrix");

  means_.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) means_[c] += training(r, c);
  for (double& m : means_) m /= static_cast<double>(n);

  Eigen::MatrixXd centered(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c)
      centered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          training(r, c) - means_[c];
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

  // Eigen returns eigenvalues in ascending order.
  axes_ = Matrix(n_components_, d);
  variances_.assign(n_components_, 0.0);
  for (std::size_t k = 0; k < n_components_; ++k) {
    const auto col = static_cast<Eigen::Index>(d - 1 - k);
    variances_[k] = solver.eigenvalues()(col);
    for (std::size_t c = 0; c < d; ++c)
      axes_(k, c) = solver.eigenvectors()(static_cast<Eigen::Index>(c), col);
  }
}

std::vector<double> PcaDetector::score(const Matrix& queries) const {
  if (axes_.empty()) throw StateError("PCA detector used before fit");
  const std::size_t d = means_.size();
  if (queries.cols() != d) {
    throw DimensionError("PCA query " + queries.shape_string() + " vs " + std::to_string(d) +
                         " fitted features");
  }
  std::vector<double> out(queries.rows());
  std::vector<double> centered(d);
  std::vector<double> residual(d);
  for (std::size_t r = 0; r < queries.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) centered[c] = queries(r, c) - means_[c];
    residual = centered;
    for (std::size_t k = 0; k < n_components_; ++k) {
      auto axis = axes_.row(k);
      double coef = 0.0;
      for (std::size_t c = 0; c < d; ++c) coef += centered[c] * axis[c];
      for (std::size_t c = 0; c < d; ++c) residual[c] -= coef * axis[c];
    }
    double acc = 0.0;
    for (double v : residual) acc += v * v;
    out[r] = acc;
  }
  return out;
}

}  // namespace anorand
