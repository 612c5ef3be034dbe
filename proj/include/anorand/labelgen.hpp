#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "anorand/matrix.hpp"
#include "anorand/rng.hpp"

namespace anorand {

struct LabelGenConfig {
  double subset_fraction = 0.02;
  double target_anomaly_fraction = 0.05;
  std::size_t smote_k = 5;
  double noise_sigma = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Provenance : std::uint8_t { kOriginalNormal, kSelectedSeed, kSmoteSynthetic };

std::string_view to_string(Provenance p);

struct SmoteParent {
  std::size_t base;      // seed row the sample starts from
  std::size_t neighbor;  // one of base's k nearest seed rows
  double gap;            // interpolation factor in [0, 1]
};

struct SmoteResult {
  Matrix rows;
  std::vector<SmoteParent> parents;  // one per generated row
};

// Training set for the semi-supervised model: normals labelled 0 and
// synthetic anomalies labelled 1.
struct LabeledTrainingSet {
  Matrix features;
  std::vector<int> labels;
  std::vector<Provenance> provenance;
  // For original/seed rows: row index in the input normals.
  // For SMOTE rows: index into smote_parents.
  std::vector<std::size_t> origin;
  // Parents refer to row indices of the input normals.
  std::vector<SmoteParent> smote_parents;

  std::size_t rows() const noexcept { return features.rows(); }
  std::size_t count(Provenance p) const;
  double anomaly_fraction() const;
  std::vector<double> targets() const;
};

struct SeedSubset {
  std::vector<std::size_t> selected;   // ascending
  std::vector<std::size_t> remaining;  // ascending
};

// Chooses ceil(fraction * n) distinct rows uniformly without replacement.
SeedSubset select_seed_subset(std::size_t n_rows, double fraction, Rng& rng);

// k nearest rows (Euclidean, excluding the row itself), ties by index.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& rows, std::size_t k);

// SMOTE: each new row is a + t·(b − a) for a uniformly chosen row a, b drawn
// uniformly from a's k nearest neighbours and t uniform on [0, 1].
// `fixed_gap` pins t (used for deterministic checks).
SmoteResult smote_oversample(const Matrix& seeds, std::size_t k, std::size_t n_new, Rng& rng,
                             std::optional<double> fixed_gap = std::nullopt);

// Adds i.i.d. N(0, sigma²) to every entry.
Matrix gaussian_perturb(const Matrix& rows, double sigma, Rng& rng);

// Number of synthetic anomalies s with s / (n_remaining + s) = target,
// rounded up.
std::size_t synthetic_anomaly_count(std::size_t n_remaining, double target_fraction);

// Seeds → SMOTE expansion → Gaussian perturbation of every synthetic anomaly
// → concatenation with the remaining normals → deterministic shuffle.
LabeledTrainingSet build_training_set(const Matrix& normals, const LabelGenConfig& config);

}  // namespace anorand
