#include "anorand/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include "anorand/baselines.hpp"
#include "anorand/errors.hpp"
#include "anorand/rng.hpp"

namespace anorand {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DetectorRun finish(const PreparedSplit& split, const std::vector<double>& scores, double fit_seconds,
                   Clock::time_point score_start) {
  DetectorRun run;
  run.score_seconds = seconds_since(score_start);
  run.eval = evaluate(scores, *split.test.labels);
  run.eval.runtime_seconds = fit_seconds;
  return run;
}

}  // namespace

TrialSeeds derive_trial_seeds(std::uint64_t trial_seed) {
  Rng rng = Rng(trial_seed).split(Stream::kTrial);
  TrialSeeds s{};
  s.data = trial_seed;
  s.split = rng.next_u64();
  s.labelgen = rng.next_u64();
  s.model = rng.next_u64();
  return s;
}

PreparedSplit prepare_split(const Dataset& raw, double test_fraction, std::uint64_t split_seed) {
  if (!raw.labels) throw ValidationError("evaluation data needs a label column");
  SplitResult parts = split(raw, SplitSpec{test_fraction, true, split_seed});
  StandardizedSets z = standardize(parts.train, {parts.test});
  return PreparedSplit{std::move(z.train), std::move(z.others.front()),
                       std::move(parts.test_indices)};
}

DetectorRun run_anorand(const PreparedSplit& split, LabelGenConfig labelgen, ModelConfig model) {
  const auto start = Clock::now();
  const Dataset normals = split.train.filter_by_label(0);
  const LabeledTrainingSet training = build_training_set(normals.features, labelgen);
  model.input_dim = split.train.cols();
  model.mode = TrainingMode::kSemiSupervised;
  AnoRandModel net(model);
  net.fit(training);
  const double fit_seconds = seconds_since(start);
  const auto score_start = Clock::now();
  return finish(split, net.score(split.test.features).y_fused, fit_seconds, score_start);
}

DetectorRun run_anorand_supervised(const PreparedSplit& split, ModelConfig model) {
  const auto start = Clock::now();
  model.input_dim = split.train.cols();
  model.mode = TrainingMode::kSupervised;
  AnoRandModel net(model);
  net.fit_supervised(split.train);
  const double fit_seconds = seconds_since(start);
  const auto score_start = Clock::now();
  return finish(split, net.score(split.test.features).y_fused, fit_seconds, score_start);
}

DetectorRun run_knn(const PreparedSplit& split, std::size_t k) {
  const auto start = Clock::now();
  KnnDetector knn(k);
  knn.fit(split.train.filter_by_label(0).features);
  const double fit_seconds = seconds_since(start);
  const auto score_start = Clock::now();
  return finish(split, knn.score(split.test.features), fit_seconds, score_start);
}

std::size_t pca_components_for_variance(const Matrix& training, double fraction) {
  PcaDetector full(training.cols());
  full.fit(training);
  const auto& var = full.explained_variance();
  const double total = std::accumulate(var.begin(), var.end(), 0.0);
  double running = 0.0;
  for (std::size_t k = 0; k < var.size(); ++k) {
    running += var[k];
    if (running >= fraction * total) return k + 1;
  }
  return var.size();
}

DetectorRun run_pca(const PreparedSplit& split, std::size_t n_components) {
  const auto start = Clock::now();
  const Matrix normals = split.train.filter_by_label(0).features;
  if (n_components == 0) n_components = pca_components_for_variance(normals, 0.9);
  PcaDetector pca(n_components);
  pca.fit(normals);
  const double fit_seconds = seconds_since(start);
  const auto score_start = Clock::now();
  return finish(split, pca.score(split.test.features), fit_seconds, score_start);
}

DetectorRun run_external(const PreparedSplit& split, const std::map<std::size_t, double>& scores) {
  const auto start = Clock::now();
  std::vector<double> test_scores;
  test_scores.reserve(split.test_indices.size());
  for (std::size_t idx : split.test_indices) {
    const auto it = scores.find(idx);
    if (it == scores.end()) {
      throw ValidationError("external scores have no entry for row_index " + std::to_string(idx));
    }
    test_scores.push_back(it->second);
  }
  return finish(split, test_scores, 0.0, start);
}

std::map<std::size_t, double> load_external_scores(const std::filesystem::path& path) {
  const Dataset table = load_csv(path);
  const auto& names = table.feature_names;
  const auto col = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw ValidationError("external score file '" + path.string() + "' lacks column '" + name +
                            "'");
    }
    return static_cast<std::size_t>(it - names.begin());
  };
  const std::size_t idx_col = col("row_index");
  const std::size_t score_col = col("score");
  std::map<std::size_t, double> out;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double idx = table.features(r, idx_col);
    if (idx < 0.0 || idx != std::floor(idx)) {
      throw ValidationError("row_index must be a non-negative integer");
    }
    out[static_cast<std::size_t>(idx)] = table.features(r, score_col);
  }
  return out;
}

std::vector<SweepRow> run_sweep(const TrialConfig& base, SweepParameter parameter,
                                std::span<const double> grid, std::span<const std::uint64_t> seeds,
                                const ProgressFn& progress,
                                const std::function<bool(double, std::uint64_t)>& skip) {
  std::vector<SweepRow> rows;
  for (std::uint64_t seed : seeds) {
    std::optional<PreparedSplit> split;
    const TrialSeeds ts = derive_trial_seeds(seed);
    for (double value : grid) {
      if (skip && skip(value, seed)) continue;
      if (!split) {
        SyntheticOptions opts = base.data;
        opts.seed = ts.data;
        split = prepare_split(generate_synthetic(opts), base.test_fraction, ts.split);
      }
      LabelGenConfig labelgen = base.labelgen;
      labelgen.seed = ts.labelgen;
      ModelConfig model = base.model;
      model.seed = ts.model;
      if (parameter == SweepParameter::kLossWeight) {
        model.loss_weight = value;
      } else {
        labelgen.noise_sigma = value;
      }
      SweepRow row{value, seed, run_anorand(*split, labelgen, model).eval};
      row.eval.seed = seed;
      if (progress) progress(row);
      rows.push_back(row);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.value != b.value ? a.value < b.value : a.seed < b.seed;
  });
  return rows;
}

DetectorSpec parse_detector(const std::string& text) {
  DetectorSpec spec;
  spec.name = text;
  if (text == "anorand") {
    spec.kind = DetectorSpec::Kind::kAnoRand;
  } else if (text == "knn") {
    spec.kind = DetectorSpec::Kind::kKnn;
  } else if (text == "pca") {
    spec.kind = DetectorSpec::Kind::kPca;
  } else if (text.rfind("external:", 0) == 0 && text.size() > 9) {
    spec.kind = DetectorSpec::Kind::kExternal;
    spec.external_path = text.substr(9);
    spec.name = "external:" + spec.external_path.stem().string();
  } else {
    throw ArgumentError("unknown detector '" + text +
                        "' (expected anorand, knn, pca or external:<path>)");
  }
  return spec;
}

std::vector<BenchRow> run_bench(const std::vector<BenchDataset>& datasets,
                                const std::vector<DetectorSpec>& detectors,
                                std::span<const std::uint64_t> seeds, const TrialConfig& config,
                                const std::function<void(const BenchRow&)>& progress) {
  std::map<std::filesystem::path, std::map<std::size_t, double>> external;
  for (const auto& det : detectors) {
    if (det.kind == DetectorSpec::Kind::kExternal && !external.count(det.external_path))
      external[det.external_path] = load_external_scores(det.external_path);
  }

  std::vector<BenchRow> rows;
  for (const auto& ds : datasets) {
    for (std::uint64_t seed : seeds) {
      const TrialSeeds ts = derive_trial_seeds(seed);
      Dataset raw;
      if (ds.fixed) {
        raw = *ds.fixed;
      } else {
        SyntheticOptions opts = ds.synthetic;
        opts.seed = ts.data;
        raw = generate_synthetic(opts);
      }
      const PreparedSplit split = prepare_split(raw, config.test_fraction, ts.split);
      for (const auto& det : detectors) {
        BenchRow row{ds.name, det.name, seed, {}};
        switch (det.kind) {
          case DetectorSpec::Kind::kAnoRand: {
            LabelGenConfig labelgen = config.labelgen;
            labelgen.seed = ts.labelgen;
            ModelConfig model = config.model;
            model.seed = ts.model;
            row.run = run_anorand(split, labelgen, model);
            break;
          }
          case DetectorSpec::Kind::kKnn:
            row.run = run_knn(split, config.knn_k);
            break;
          case DetectorSpec::Kind::kPca:
            row.run = run_pca(split, config.pca_components);
            break;
          case DetectorSpec::Kind::kExternal:
            if (!ds.fixed) {
              throw ValidationError("external scores need a fixed data set, not '" + ds.name + "'");
            }
            row.run = run_external(split, external.at(det.external_path));
            break;
        }
        row.run.eval.seed = seed;
        if (progress) progress(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<RankRow> rank_table(const std::vector<BenchRow>& rows) {
  std::vector<RankRow> table;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.dataset, r.detector);
    auto [it, inserted] = index.try_emplace(key, table.size());
    if (inserted) table.push_back({r.dataset, r.detector, 0.0, 0.0, 0.0, 0});
    RankRow& t = table[it->second];
    t.mean_pr_auc += r.run.eval.pr_auc;
    t.mean_roc_auc += r.run.eval.roc_auc;
    t.mean_fit_seconds += r.run.eval.runtime_seconds;
    ++counts[key];
  }
  for (auto& t : table) {
    const auto n = static_cast<double>(counts[{t.dataset, t.detector}]);
    t.mean_pr_auc /= n;
    t.mean_roc_auc /= n;
    t.mean_fit_seconds /= n;
  }
  for (auto& t : table) {
    std::size_t better = 0;
    for (const auto& other : table)
      if (other.dataset == t.dataset && other.mean_pr_auc > t.mean_pr_auc) ++better;
    t.rank = better + 1;
  }
  std::stable_sort(table.begin(), table.end(), [](const RankRow& a, const RankRow& b) {
    return a.dataset != b.dataset ? a.dataset < b.dataset : a.rank < b.rank;
  });
  return table;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty vector");
  return quantile(values, 0.5);
}

double interquartile_range(std::span<const double> values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

}  // namespace anorand
