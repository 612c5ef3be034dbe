#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "anorand/matrix.hpp"

namespace anorand {

// Feature matrix with optional 0/1 labels (1 = anomaly).
struct Dataset {
  Matrix features;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> feature_names;
  // Populated by standardize(); empty otherwise.
  std::vector<double> feature_means;
  std::vector<double> feature_stds;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t cols() const noexcept { return features.cols(); }
  bool has_labels() const noexcept { return labels.has_value(); }
  std::size_t count_label(int value) const;

  // Rows whose label equals `value`. Requires labels.
  Dataset filter_by_label(int value) const;
  Dataset select(const std::vector<std::size_t>& indices) const;

  // Throws ValidationError on inconsistent shapes or labels outside {0, 1}.
  void validate() const;
};

struct SyntheticOptions {
  std::size_t n = 20000;
  std::size_t d = 20;
  double imbalance = 0.05;
  double class_sep = 1.0;
  double flip_fraction = 0.01;
  // Features carrying class information; 0 means all d features.
  std::size_t n_informative = 0;
  std::size_t clusters_per_class = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Everything the generator knows, for tests that need the latent structure.
struct SyntheticData {
  Dataset dataset;
  // Informative coordinates before mixing: centroid + N(0, I).
  Matrix cluster_coordinates;
  // One row per cluster (hypercube vertex), n_informative columns.
  Matrix centroids;
  std::vector<std::size_t> cluster_of_row;
  // Class of each row's cluster, before label flipping.
  std::vector<int> clean_labels;
};

// Two-class Gaussian clusters on hypercube vertices of side 2 * class_sep,
// mixed by a random linear map, with a fraction of labels swapped between
// classes. The minority class (label 1) holds round(imbalance * n) rows.
SyntheticData generate_synthetic_detailed(const SyntheticOptions& options);
Dataset generate_synthetic(const SyntheticOptions& options);

// Reads a header-first comma-separated file. When `label_column` is given the
// named column becomes the label vector and is excluded from the features.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

// Writes features (and a trailing label column when present) with
// round-trip precision.
void write_csv(const Dataset& dataset, const std::filesystem::path& path,
               const std::string& label_column = "label");

// Column names of a header-first CSV file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

struct StandardizedSets {
  Dataset train;
  std::vector<Dataset> others;
};

// z-scores every set with the train set's per-column mean and population
// standard deviation. Constant train columns (std < 1e-12) pass through
// unchanged; they are recorded with mean 0 and std 1.
StandardizedSets standardize(const Dataset& train, const std::vector<Dataset>& others = {});

// Applies previously computed statistics.
Matrix apply_standardization(const Matrix& features, const std::vector<double>& means,
                             const std::vector<double>& stds);

struct SplitSpec {
  double test_fraction = 0.3;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
};

SplitResult split(const Dataset& dataset, const SplitSpec& spec);

}  // namespace anorand
