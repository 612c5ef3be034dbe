#include "anorand/labelgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anorand/errors.hpp"

namespace anorand {

namespace {

// Absorbs floating-point noise in products such as 0.02 * 50 before ceil().
std::size_t ceil_count(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

}  // namespace

void LabelGenConfig::validate() const {
  if (!(subset_fraction > 0.0 && subset_fraction < target_anomaly_fraction &&
        target_anomaly_fraction < 0.5)) {
    throw ArgumentError("label generation requires 0 < subset_fraction (" +
                        std::to_string(subset_fraction) + ") < target_anomaly_fraction (" +
                        std::to_string(target_anomaly_fraction) + ") < 0.5");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ArgumentError("noise_sigma must be finite and >= 0");
  }
  if (smote_k < 1) throw ArgumentError("smote_k must be >= 1");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kOriginalNormal:
      return "original_normal";
    case Provenance::kSelectedSeed:
      return "selected_seed";
    case Provenance::kSmoteSynthetic:
      return "smote_synthetic";
  }
  return "original_normal";
}

std::size_t LabeledTrainingSet::count(Provenance p) const {
  return static_cast<std::size_t>(std::count(provenance.begin(), provenance.end(), p));
}

double LabeledTrainingSet::anomaly_fraction() const {
  if (labels.empty()) return 0.0;
  return static_cast<double>(std::count(labels.begin(), labels.end(), 1)) /
         static_cast<double>(labels.size());
}

std::vector<double> LabeledTrainingSet::targets() const {
  return {labels.begin(), labels.end()};
}

SeedSubset select_seed_subset(std::size_t n_rows, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("seed fraction must lie in (0, 1) (got " + std::to_string(fraction) + ")");
  }
  const double expected = fraction * static_cast<double>(n_rows);
  if (expected < 1.0 - 1e-9) {
    throw ArgumentError("seed fraction " + std::to_string(fraction) + " selects no rows out of " +
                        std::to_string(n_rows));
  }
  const std::size_t count = std::min(ceil_count(expected), n_rows);
  std::vector<std::size_t> order = rng.permutation(n_rows);
  SeedSubset subset;
  subset.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  subset.remaining.assign(order.begin() + static_cast<std::ptrdiff_t>(count), order.end());
  std::sort(subset.selected.begin(), subset.selected.end());
  std::sort(subset.remaining.begin(), subset.remaining.end());
  return subset;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& rows, std::size_t k) {
  const std::size_t n = rows.rows();
  if (k >= n) {
    throw ArgumentError("k (" + std::to_string(k) + ") must be smaller than the row count (" +
                        std::to_string(n) + ")");
  }
  std::vector<std::vector<std::size_t>> result(n);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    auto a = rows.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto b = rows.row(j);
      double acc = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        acc += diff * diff;
      }
      dist.emplace_back(acc, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    result[i].reserve(k);
    for (std::size_t m = 0; m < k; ++m) result[i].push_back(dist[m].second);
  }
  return result;
}

SmoteResult smote_oversample(const Matrix& seeds, std::size_t k, std::size_t n_new, Rng& rng,
                             std::optional<double> fixed_gap) {
  if (seeds.rows() < 2) {
    throw ArgumentError("SMOTE needs at least 2 seed rows (got " + std::to_string(seeds.rows()) +
                        ")");
  }
  if (k < 1) throw ArgumentError("SMOTE k must be >= 1");
  if (fixed_gap && !(*fixed_gap >= 0.0 && *fixed_gap <= 1.0)) {
    throw ArgumentError("SMOTE gap must lie in [0, 1]");
  }
  SmoteResult out{Matrix(n_new, seeds.cols()), {}};
  if (n_new == 0) return out;
  const auto neighbors = nearest_neighbors(seeds, k);
  out.parents.reserve(n_new);
  for (std::size_t i = 0; i < n_new; ++i) {
    const std::size_t base = rng.index(seeds.rows());
    const std::size_t neighbor = neighbors[base][rng.index(k)];
    const double gap = fixed_gap ? *fixed_gap : rng.uniform();
    auto a = seeds.row(base);
    auto b = seeds.row(neighbor);
    auto dst = out.rows.row(i);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = a[c] + gap * (b[c] - a[c]);
    out.parents.push_back({base, neighbor, gap});
  }
  return out;
}

Matrix gaussian_perturb(const Matrix& rows, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  Matrix out = rows;
  if (sigma == 0.0) return out;
  for (double& v : out.values()) v += sigma * rng.normal();
  return out;
}

std::size_t synthetic_anomaly_count(std::size_t n_remaining, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw ArgumentError("target anomaly fraction must lie in (0, 1)");
  }
  return ceil_count(target_fraction * static_cast<double>(n_remaining) / (1.0 - target_fraction));
}

LabeledTrainingSet build_training_set(const Matrix& normals, const LabelGenConfig& config) {
  config.validate();
  if (normals.rows() == 0) throw ArgumentError("no normal rows to build a training set from");

  const Rng root = Rng(config.seed).split(Stream::kLabelGen);
  Rng select_rng = root.split(1);
  Rng smote_rng = root.split(2);
  Rng noise_rng = root.split(3);
  Rng shuffle_rng = root.split(4);

  const SeedSubset subset = select_seed_subset(normals.rows(), config.subset_fraction, select_rng);
  const Matrix seeds = normals.select_rows(subset.selected);
  const std::size_t total_synthetic =
      synthetic_anomaly_count(subset.remaining.size(), config.target_anomaly_fraction);
  const std::size_t n_new =
      total_synthetic > seeds.rows() ? total_synthetic - seeds.rows() : std::size_t{0};

  SmoteResult smote = n_new == 0 ? SmoteResult{Matrix(0, normals.cols()), {}}
                                 : smote_oversample(seeds, config.smote_k, n_new, smote_rng);
  // Parents are reported against the caller's row numbering.
  for (auto& parent : smote.parents) {
    parent.base = subset.selected[parent.base];
    parent.neighbor = subset.selected[parent.neighbor];
  }

  const Matrix anomalies =
      gaussian_perturb(vconcat(seeds, smote.rows), config.noise_sigma, noise_rng);
  const Matrix remaining = normals.select_rows(subset.remaining);
  const Matrix stacked = vconcat(remaining, anomalies);

  std::vector<int> labels;
  std::vector<Provenance> provenance;
  std::vector<std::size_t> origin;
  labels.reserve(stacked.rows());
  for (std::size_t idx : subset.remaining) {
    labels.push_back(0);
    provenance.push_back(Provenance::kOriginalNormal);
    origin.push_back(idx);
  }
  for (std::size_t idx : subset.selected) {
    labels.push_back(1);
    provenance.push_back(Provenance::kSelectedSeed);
    origin.push_back(idx);
  }
  for (std::size_t i = 0; i < smote.rows.rows(); ++i) {
    labels.push_back(1);
    provenance.push_back(Provenance::kSmoteSynthetic);
    origin.push_back(i);
  }

  const std::vector<std::size_t> order = shuffle_rng.permutation(stacked.rows());
  LabeledTrainingSet out;
  out.features = stacked.select_rows(order);
  out.labels.reserve(order.size());
  out.provenance.reserve(order.size());
  out.origin.reserve(order.size());
  for (std::size_t i : order) {
    out.labels.push_back(labels[i]);
    out.provenance.push_back(provenance[i]);
    out.origin.push_back(origin[i]);
  }
  out.smote_parents = std::move(smote.parents);
  return out;
}

}  // namespace anorand
