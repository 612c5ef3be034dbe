#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anorand/data.hpp"
#include "anorand/labelgen.hpp"
#include "anorand/metrics.hpp"
#include "anorand/model.hpp"

namespace anorand {

// Settings shared by every trial of a sweep or benchmark.
struct TrialConfig {
  SyntheticOptions data;  // seed is replaced by the trial seed
  double test_fraction = 0.3;
  LabelGenConfig labelgen;
  ModelConfig model;  // input_dim is filled from the data
  std::size_t knn_k = 5;
  // 0: smallest count explaining >= 90% of the training variance.
  std::size_t pca_components = 0;
};

// Standardized train/test split. `train` keeps every training row and its
// labels; detectors in the semi-supervised protocol only see its normals.
struct PreparedSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> test_indices;  // rows of the source dataset
};

// Per-trial seeds derived from one trial seed.
struct TrialSeeds {
  std::uint64_t data;
  std::uint64_t split;
  std::uint64_t labelgen;
  std::uint64_t model;
};
TrialSeeds derive_trial_seeds(std::uint64_t trial_seed);

PreparedSplit prepare_split(const Dataset& raw, double test_fraction, std::uint64_t split_seed);

// Result of fitting one detector and scoring the test split.
struct DetectorRun {
  EvalResult eval;  // eval.runtime_seconds is the fit time
  double score_seconds = 0.0;
};

// Semi-supervised protocol: labelgen on the training normals, fit, score test.
DetectorRun run_anorand(const PreparedSplit& split, LabelGenConfig labelgen, ModelConfig model);
// Supervised protocol: fit on all training rows with their true labels.
DetectorRun run_anorand_supervised(const PreparedSplit& split, ModelConfig model);
DetectorRun run_knn(const PreparedSplit& split, std::size_t k);
DetectorRun run_pca(const PreparedSplit& split, std::size_t n_components);
// Scores from an external (row_index, score) file, evaluated on the test rows.
DetectorRun run_external(const PreparedSplit& split, const std::map<std::size_t, double>& scores);

std::map<std::size_t, double> load_external_scores(const std::filesystem::path& path);

// Smallest number of leading components whose variance reaches `fraction`.
std::size_t pca_components_for_variance(const Matrix& training, double fraction);

enum class SweepParameter { kLossWeight, kNoiseSigma };

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  EvalResult eval;
};

using ProgressFn = std::function<void(const SweepRow&)>;

// One trial per (value, seed): the data set is regenerated per seed. Rows
// come back sorted by value, then seed. `skip` lists (value, seed) pairs to
// leave out (already present when resuming).
std::vector<SweepRow> run_sweep(const TrialConfig& base, SweepParameter parameter,
                                std::span<const double> grid, std::span<const std::uint64_t> seeds,
                                const ProgressFn& progress = {},
                                const std::function<bool(double, std::uint64_t)>& skip = {});

struct DetectorSpec {
  enum class Kind { kAnoRand, kKnn, kPca, kExternal };
  Kind kind = Kind::kAnoRand;
  std::string name;
  std::filesystem::path external_path;
};

// Parses anorand | knn | pca | external:<path>.
DetectorSpec parse_detector(const std::string& text);

struct BenchDataset {
  std::string name;
  // Either a fixed labelled data set, or regenerated per seed from options.
  std::optional<Dataset> fixed;
  SyntheticOptions synthetic;
};

struct BenchRow {
  std::string dataset;
  std::string detector;
  std::uint64_t seed = 0;
  DetectorRun run;
};

std::vector<BenchRow> run_bench(const std::vector<BenchDataset>& datasets,
                                const std::vector<DetectorSpec>& detectors,
                                std::span<const std::uint64_t> seeds, const TrialConfig& config,
                                const std::function<void(const BenchRow&)>& progress = {});

struct RankRow {
  std::string dataset;
  std::string detector;
  double mean_pr_auc = 0.0;
  double mean_roc_auc = 0.0;
  double mean_fit_seconds = 0.0;
  std::size_t rank = 0;  // 1 = highest mean PR-AUC within the data set
};

std::vector<RankRow> rank_table(const std::vector<BenchRow>& rows);

double median(std::vector<double> values);
// Q3 − Q1 with linear interpolation.
double interquartile_range(std::span<const double> values);

}  // namespace anorand
