#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "anorand/checkpoint.hpp"
#include "anorand/data.hpp"
#include "anorand/errors.hpp"
#include "anorand/experiment.hpp"
#include "anorand/labelgen.hpp"
#include "anorand/metrics.hpp"
#include "anorand/model.hpp"

namespace anorand::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Bad flag value; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Every flag of the subcommand with its effective value.
json flag_snapshot(const CLI::App& app) {
  json flags = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const std::string name = opt->get_single_name();
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_type_size() == 0) {
        flags[name] = true;
      } else if (results.size() == 1) {
        flags[name] = results.front();
      } else {
        flags[name] = results;
      }
    } else {
      flags[name] = opt->get_default_str();
    }
  }
  return flags;
}

struct Manifest {
  std::string command;
  json flags;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string started_at;
  json extra = json::object();

  void write_beside(const fs::path& artifact) const {
    json j{{"schema_version", kSchemaVersion},
           {"command", command},
           {"flags", flags},
           {"seed", seed},
           {"inputs", inputs},
           {"outputs", outputs},
           {"tool_version", kToolVersion},
           {"started_at", started_at},
           {"finished_at", utc_timestamp()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    const fs::path path = artifact.string() + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
    out << j.dump(2) << '\n';
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Shared flag groups

void add_synthetic_flags(CLI::App* app, SyntheticOptions& opts) {
  app->add_option("--n", opts.n, "Number of rows")->capture_default_str();
  app->add_option("--dim", opts.d, "Number of features")->capture_default_str();
  app->add_option("--imbalance", opts.imbalance, "Minority (anomaly) fraction, in (0, 0.5)")
      ->capture_default_str();
  app->add_option("--class-sep", opts.class_sep, "Half side of the cluster hypercube")
      ->capture_default_str();
  app->add_option("--flip", opts.flip_fraction, "Fraction of labels swapped between classes")
      ->capture_default_str();
  app->add_option("--informative", opts.n_informative, "Informative features (0 = all)")
      ->capture_default_str();
}

void check_synthetic_flags(const SyntheticOptions& o) {
  require(o.n >= 10, "--n must be >= 10 (got " + std::to_string(o.n) + ")");
  require(o.d >= 2, "--dim must be >= 2 (got " + std::to_string(o.d) + ")");
  require(o.imbalance > 0.0 && o.imbalance < 0.5,
          "--imbalance must lie in (0, 0.5) (got " + format_double(o.imbalance) + ")");
  require(o.flip_fraction >= 0.0 && o.flip_fraction <= 1.0,
          "--flip must lie in [0, 1] (got " + format_double(o.flip_fraction) + ")");
  require(o.class_sep >= 0.0, "--class-sep must be >= 0");
  require(o.n_informative <= o.d, "--informative must not exceed --dim");
}

void add_labelgen_flags(CLI::App* app, LabelGenConfig& cfg) {
  app->add_option("--sigma", cfg.noise_sigma, "Gaussian noise std for synthetic anomalies")
      ->capture_default_str();
  app->add_option("--subset", cfg.subset_fraction, "Fraction of normals used as SMOTE seeds")
      ->capture_default_str();
  app->add_option("--target", cfg.target_anomaly_fraction, "Synthetic anomaly fraction")
      ->capture_default_str();
  app->add_option("--smote-k", cfg.smote_k, "SMOTE neighbour count")->capture_default_str();
}

void check_labelgen_flags(const LabelGenConfig& c) {
  require(c.noise_sigma >= 0.0, "--sigma must be >= 0 (got " + format_double(c.noise_sigma) + ")");
  require(c.subset_fraction > 0.0 && c.subset_fraction < c.target_anomaly_fraction,
          "--subset must lie in (0, --target)");
  require(c.target_anomaly_fraction < 0.5, "--target must be < 0.5");
  require(c.smote_k >= 1, "--smote-k must be >= 1");
}

void add_model_flags(CLI::App* app, ModelConfig& cfg) {
  app->add_option("--w", cfg.loss_weight, "Weight of the noise-detection loss, in [0, 1]")
      ->capture_default_str();
  app->add_option("--epochs", cfg.epochs)->capture_default_str();
  app->add_option("--batch", cfg.batch_size)->capture_default_str();
  app->add_option("--lr", cfg.learning_rate)->capture_default_str();
  app->add_option("--ffp-hidden", cfg.ffp_hidden, "FFP layer sizes, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--encoder-hidden", cfg.encoder_hidden, "Encoder layer sizes, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--latent", cfg.latent_dim, "Fused latent size")->capture_default_str();
}

void check_model_flags(const ModelConfig& c) {
  require(c.loss_weight >= 0.0 && c.loss_weight <= 1.0,
          "--w must lie in [0, 1] (got " + format_double(c.loss_weight) + ")");
  require(c.epochs >= 1, "--epochs must be >= 1");
  require(c.batch_size >= 1, "--batch must be >= 1");
  require(c.learning_rate > 0.0, "--lr must be positive");
  require(c.latent_dim >= 1, "--latent must be >= 1");
  require(!c.ffp_hidden.empty() &&
              std::all_of(c.ffp_hidden.begin(), c.ffp_hidden.end(), [](auto v) { return v > 0; }),
          "--ffp-hidden must list positive sizes");
  require(!c.encoder_hidden.empty() && std::all_of(c.encoder_hidden.begin(),
                                                   c.encoder_hidden.end(),
                                                   [](auto v) { return v > 0; }),
          "--encoder-hidden must list positive sizes");
}

// Loads a CSV, dropping `label_column` from the features when present.
Dataset load_features(const fs::path& path, const std::string& label_column, bool keep_labels) {
  const auto header = read_csv_header(path);
  const bool has_label = std::find(header.begin(), header.end(), label_column) != header.end();
  Dataset ds = has_label ? load_csv(path, label_column) : load_csv(path);
  if (!keep_labels) ds.labels.reset();
  return ds;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateFlags {
  SyntheticOptions synthetic;
  std::string out;
};

int cmd_generate(const CLI::App& app, const GenerateFlags& f, std::ostream& out) {
  const std::string started = utc_timestamp();
  check_synthetic_flags(f.synthetic);
  const Dataset ds = generate_synthetic(f.synthetic);
  write_csv(ds, f.out);
  Manifest m{"generate", flag_snapshot(app), f.synthetic.seed, {}, {f.out}, started};
  m.extra["rows"] = ds.rows();
  m.extra["anomalies"] = ds.count_label(1);
  m.write_beside(f.out);
  out << "wrote " << ds.rows() << " rows (" << ds.count_label(1) << " anomalies) to " << f.out
      << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainFlags {
  std::string data;
  std::string label_column = "label";
  std::string mode = "semi_supervised";
  LabelGenConfig labelgen;
  ModelConfig model;
  std::uint64_t seed = 0;
  std::string model_out;
  std::string history_out;
};

int cmd_train(const CLI::App& app, TrainFlags f, std::ostream& out) {
  const std::string started = utc_timestamp();
  TrainingMode mode{};
  try {
    mode = training_mode_from_string(f.mode);
  } catch (const ArgumentError&) {
    throw UsageError("--mode must be semi_supervised or supervised (got '" + f.mode + "')");
  }
  check_model_flags(f.model);
  if (mode == TrainingMode::kSemiSupervised) check_labelgen_flags(f.labelgen);

  const bool supervised = mode == TrainingMode::kSupervised;
  Dataset raw = load_features(f.data, f.label_column, supervised);
  if (supervised && !raw.labels) {
    throw ValidationError("supervised mode requires the label column '" + f.label_column +
                          "' in " + f.data);
  }
  const Dataset train = standardize(raw).train;

  const TrialSeeds seeds = derive_trial_seeds(f.seed);
  ModelConfig cfg = f.model;
  cfg.input_dim = train.cols();
  cfg.mode = mode;
  cfg.seed = seeds.model;
  AnoRandModel model(cfg);

  std::vector<EpochLoss> history;
  json extra = json::object();
  if (supervised) {
    history = model.fit_supervised(train);
  } else {
    LabelGenConfig lg = f.labelgen;
    lg.seed = seeds.labelgen;
    const LabeledTrainingSet ts = build_training_set(train.features, lg);
    extra["training_rows"] = ts.rows();
    extra["synthetic_anomalies"] = ts.count(Provenance::kSelectedSeed) +
                                   ts.count(Provenance::kSmoteSynthetic);
    history = model.fit(ts);
  }
  extra["alpha"] = model.alpha();

  save_checkpoint(f.model_out, Checkpoint{model, train.feature_means, train.feature_stds});
  const std::string history_path =
      f.history_out.empty() ? f.model_out + ".history.csv" : f.history_out;
  std::ostringstream csv;
  csv << "epoch,total,prediction,reconstruction\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    csv << (e + 1) << ',' << format_double(history[e].total) << ','
        << format_double(history[e].prediction) << ',' << format_double(history[e].reconstruction)
        << '\n';
  }
  write_text(history_path, csv.str());

  Manifest m{"train", flag_snapshot(app), f.seed, {f.data}, {f.model_out, history_path}, started,
             extra};
  m.write_beside(f.model_out);
  m.write_beside(history_path);
  out << "trained " << to_string(mode) << " model on " << train.rows() << " rows; alpha="
      << format_double(model.alpha()) << " final loss=" << format_double(history.back().total)
      << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreFlags {
  std::string model;
  std::string data;
  std::string label_column = "label";
  std::string out;
};

int cmd_score(const CLI::App& app, const ScoreFlags& f, std::ostream& out) {
  const std::string started = utc_timestamp();
  const Checkpoint cp = load_checkpoint(f.model);
  const Dataset ds = load_features(f.data, f.label_column, false);
  const Matrix x = cp.feature_means.empty()
                       ? ds.features
                       : apply_standardization(ds.features, cp.feature_means, cp.feature_stds);
  const ScoreReport report = cp.model.score(x);

  std::ostringstream csv;
  csv << "row_index,y_nd,y_ae,y_fused\n";
  for (std::size_t i = 0; i < report.y_fused.size(); ++i) {
    csv << i << ',' << format_double(report.y_nd[i]) << ',' << format_double(report.y_ae[i]) << ','
        << format_double(report.y_fused[i]) << '\n';
  }
  write_text(f.out, csv.str());
  Manifest m{"score", flag_snapshot(app), cp.model.config().seed, {f.model, f.data}, {f.out},
             started};
  m.extra["alpha"] = report.alpha;
  m.extra["rows"] = report.y_fused.size();
  m.write_beside(f.out);
  out << "scored " << report.y_fused.size() << " rows; alpha=" << format_double(report.alpha)
      << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalFlags {
  std::string scores;
  std::string score_column = "y_fused";
  std::string labels;
  std::string label_column = "label";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_eval(const CLI::App& app, const EvalFlags& f, std::ostream& out) {
  const std::string started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  json result{{"schema_version", kSchemaVersion}, {"seed", f.seed}};
  result["config"] = {{"scores", f.scores},
                      {"score_column", f.score_column},
                      {"labels", f.labels.empty() ? f.scores : f.labels},
                      {"label_column", f.label_column}};
  int code = 0;
  try {
    const Dataset scores_table = load_csv(f.scores);
    const auto& names = scores_table.feature_names;
    const auto col = std::find(names.begin(), names.end(), f.score_column);
    if (col == names.end()) {
      throw ValidationError("score column '" + f.score_column + "' not found in " + f.scores);
    }
    const auto c = static_cast<std::size_t>(col - names.begin());
    std::vector<double> scores(scores_table.rows());
    for (std::size_t r = 0; r < scores.size(); ++r) scores[r] = scores_table.features(r, c);

    const Dataset labelled = load_csv(f.labels.empty() ? f.scores : f.labels, f.label_column);
    std::vector<int> labels = *labelled.labels;
    const auto idx_col = std::find(names.begin(), names.end(), "row_index");
    if (idx_col != names.end() && !f.labels.empty()) {
      // Align through row_index when the scores carry it.
      const auto ic = static_cast<std::size_t>(idx_col - names.begin());
      std::vector<int> aligned(scores.size());
      for (std::size_t r = 0; r < scores.size(); ++r) {
        const double idx = scores_table.features(r, ic);
        if (idx < 0.0 || idx >= static_cast<double>(labels.size()) || idx != std::floor(idx)) {
          throw ValidationError("row_index " + format_double(idx) + " has no label row");
        }
        aligned[r] = labels[static_cast<std::size_t>(idx)];
      }
      labels = std::move(aligned);
    } else if (labels.size() != scores.size()) {
      throw ValidationError("score rows (" + std::to_string(scores.size()) +
                            ") and label rows (" + std::to_string(labels.size()) + ") differ");
    }
    const EvalResult r = evaluate(scores, labels);
    result["roc_auc"] = r.roc_auc;
    result["pr_auc"] = r.pr_auc;
    result["n_pos"] = r.n_pos;
    result["n_neg"] = r.n_neg;
  } catch (const UndefinedMetricError& e) {
    result["error"] = "undefined_metric";
    result["reason"] = e.what();
    code = 1;
  } catch (const Error& e) {
    result["error"] = "invalid_input";
    result["reason"] = e.what();
    code = 1;
  }
  result["runtime_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = result.dump(2) + "\n";
  if (f.out.empty()) {
    out << text;
  } else {
    write_text(f.out, text);
    Manifest m{"eval", flag_snapshot(app), f.seed, {f.scores}, {f.out}, started};
    if (!f.labels.empty()) m.inputs.push_back(f.labels);
    m.write_beside(f.out);
  }
  return code;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepFlags {
  SyntheticOptions synthetic;
  LabelGenConfig labelgen;
  ModelConfig model;
  std::vector<double> grid;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  double test_fraction = 0.3;
  std::string out;
  bool resume = false;
};

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
  return seeds;
}

double parse_cell(const std::string& cell) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("cannot parse '" + cell + "' in existing sweep file");
  }
  return v;
}

int cmd_sweep(const CLI::App& app, const SweepFlags& f, SweepParameter parameter,
              std::ostream& out, std::ostream& err) {
  const std::string started = utc_timestamp();
  const char* column = parameter == SweepParameter::kLossWeight ? "w" : "sigma";
  check_synthetic_flags(f.synthetic);
  check_labelgen_flags(f.labelgen);
  check_model_flags(f.model);
  require(!f.grid.empty(), "--grid must not be empty");
  require(f.repeats >= 1, "--repeats must be >= 1");
  require(f.test_fraction > 0.0 && f.test_fraction < 1.0, "--test-fraction must lie in (0, 1)");
  for (double v : f.grid) {
    if (parameter == SweepParameter::kLossWeight) {
      require(v >= 0.0 && v <= 1.0, "--grid values for w must lie in [0, 1]");
    } else {
      require(v >= 0.0, "--grid values for sigma must be >= 0");
    }
  }

  const std::string header = std::string(column) + ",seed,roc_auc,pr_auc,runtime_seconds";
  // Existing rows keyed by (value, seed), kept byte-for-byte when resuming.
  std::map<std::pair<double, std::uint64_t>, std::string> lines;
  if (f.resume && fs::exists(f.out)) {
    std::ifstream in(f.out);
    std::string line;
    std::getline(in, line);
    if (line != header) throw ValidationError("cannot resume: '" + f.out + "' has another header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) {
        throw ParseError("malformed row in '" + f.out + "': " + line);
      }
      const double value = parse_cell(line.substr(0, c1));
      const auto seed = static_cast<std::uint64_t>(parse_cell(line.substr(c1 + 1, c2 - c1 - 1)));
      lines[{value, seed}] = line;
    }
  }

  TrialConfig base;
  base.data = f.synthetic;
  base.labelgen = f.labelgen;
  base.model = f.model;
  base.test_fraction = f.test_fraction;
  const auto seeds = seed_range(f.seed, f.repeats);
  const auto rows = run_sweep(
      base, parameter, f.grid, seeds,
      [&](const SweepRow& r) {
        err << column << '=' << format_double(r.value) << " seed=" << r.seed
            << " pr_auc=" << format_double(r.eval.pr_auc) << '\n';
      },
      [&](double v, std::uint64_t s) { return lines.count({v, s}) > 0; });
  for (const auto& r : rows) {
    std::ostringstream line;
    line << format_double(r.value) << ',' << r.seed << ',' << format_double(r.eval.roc_auc) << ','
         << format_double(r.eval.pr_auc) << ',' << format_double(r.eval.runtime_seconds);
    lines[{r.value, r.seed}] = line.str();
  }

  std::ostringstream csv;
  csv << header << '\n';
  for (const auto& [key, line] : lines) csv << line << '\n';
  write_text(f.out, csv.str());

  Manifest m{parameter == SweepParameter::kLossWeight ? "sweep-w" : "sweep-noise",
             flag_snapshot(app), f.seed, {}, {f.out}, started};
  m.extra["grid"] = f.grid;
  m.extra["repeats"] = f.repeats;
  m.extra["seeds"] = seeds;
  m.extra["computed_rows"] = rows.size();
  m.extra["dataset"] = {{"n", f.synthetic.n},
                        {"d", f.synthetic.d},
                        {"imbalance", f.synthetic.imbalance},
                        {"class_sep", f.synthetic.class_sep},
                        {"flip_fraction", f.synthetic.flip_fraction},
                        {"n_informative", f.synthetic.n_informative},
                        {"note", "feature dimension and class_sep are tool defaults"}};
  m.write_beside(f.out);
  out << "wrote " << lines.size() << " rows to " << f.out << " (" << rows.size()
      << " computed)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
  std::vector<std::string> data;
  std::string label_column = "label";
  SyntheticOptions synthetic;
  LabelGenConfig labelgen;
  ModelConfig model;
  std::vector<std::string> detectors{"anorand", "knn", "pca"};
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  double test_fraction = 0.3;
  std::size_t knn_k = 5;
  std::size_t pca_components = 0;
  std::string out;
  std::string ranks_out;
};

int cmd_bench(const CLI::App& app, const BenchFlags& f, std::ostream& out, std::ostream& err) {
  const std::string started = utc_timestamp();
  check_labelgen_flags(f.labelgen);
  check_model_flags(f.model);
  require(f.repeats >= 1, "--repeats must be >= 1");
  require(f.knn_k >= 1, "--knn-k must be >= 1");
  require(f.test_fraction > 0.0 && f.test_fraction < 1.0, "--test-fraction must lie in (0, 1)");

  std::vector<DetectorSpec> detectors;
  for (const auto& d : f.detectors) {
    try {
      detectors.push_back(parse_detector(d));
    } catch (const ArgumentError& e) {
      throw UsageError(std::string("--detectors: ") + e.what());
    }
  }

  std::vector<BenchDataset> datasets;
  if (f.data.empty()) {
    check_synthetic_flags(f.synthetic);
    datasets.push_back({"synthetic", std::nullopt, f.synthetic});
  } else {
    for (const auto& path : f.data) {
      Dataset ds = load_csv(path, f.label_column);
      datasets.push_back({fs::path(path).stem().string(), std::move(ds), {}});
    }
  }

  TrialConfig config;
  config.labelgen = f.labelgen;
  config.model = f.model;
  config.test_fraction = f.test_fraction;
  config.knn_k = f.knn_k;
  config.pca_components = f.pca_components;
  const auto seeds = seed_range(f.seed, f.repeats);
  const auto rows = run_bench(datasets, detectors, seeds, config, [&](const BenchRow& r) {
    err << r.dataset << ' ' << r.detector << " seed=" << r.seed
        << " pr_auc=" << format_double(r.run.eval.pr_auc) << '\n';
  });

  std::ostringstream csv;
  csv << "dataset,detector,seed,roc_auc,pr_auc,fit_seconds,score_seconds\n";
  for (const auto& r : rows) {
    csv << r.dataset << ',' << r.detector << ',' << r.seed << ','
        << format_double(r.run.eval.roc_auc) << ',' << format_double(r.run.eval.pr_auc) << ','
        << format_double(r.run.eval.runtime_seconds) << ',' << format_double(r.run.score_seconds)
        << '\n';
  }
  write_text(f.out, csv.str());

  const auto ranks = rank_table(rows);
  std::ostringstream rank_csv;
  rank_csv << "dataset,detector,mean_pr_auc,mean_roc_auc,mean_fit_seconds,rank\n";
  for (const auto& r : ranks) {
    rank_csv << r.dataset << ',' << r.detector << ',' << format_double(r.mean_pr_auc) << ','
             << format_double(r.mean_roc_auc) << ',' << format_double(r.mean_fit_seconds) << ','
             << r.rank << '\n';
  }
  const std::string ranks_path = f.ranks_out.empty() ? f.out + ".ranks.csv" : f.ranks_out;
  write_text(ranks_path, rank_csv.str());

  Manifest m{"bench", flag_snapshot(app), f.seed, f.data, {f.out, ranks_path}, started};
  m.extra["seeds"] = seeds;
  m.write_beside(f.out);
  m.write_beside(ranks_path);

  out << std::left << std::setw(14) << "dataset" << std::setw(24) << "detector" << std::setw(12)
      << "pr_auc" << std::setw(12) << "roc_auc" << std::setw(12) << "fit_s" << "rank\n";
  for (const auto& r : ranks) {
    out << std::left << std::setw(14) << r.dataset << std::setw(24) << r.detector << std::fixed
        << std::setprecision(4) << std::setw(12) << r.mean_pr_auc << std::setw(12)
        << r.mean_roc_auc << std::setw(12) << r.mean_fit_seconds << r.rank << '\n';
  }
  out.unsetf(std::ios::fixed);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AnoRand semi-supervised anomaly detection toolkit", "anorand"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic labelled data set");
  add_synthetic_flags(generate, gen.synthetic);
  generate->add_option("--seed", gen.synthetic.seed)->capture_default_str();
  generate->add_option("--out", gen.out, "Output CSV")->required();

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", train.data, "Training CSV")->required();
  train_cmd->add_option("--label-column", train.label_column)->capture_default_str();
  train_cmd->add_option("--mode", train.mode, "semi_supervised | supervised")->capture_default_str();
  add_labelgen_flags(train_cmd, train.labelgen);
  add_model_flags(train_cmd, train.model);
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--model-out", train.model_out, "Checkpoint path")->required();
  train_cmd->add_option("--history-out", train.history_out,
                        "Loss history CSV (default: <model-out>.history.csv)");

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "Score a CSV with a trained checkpoint");
  score_cmd->add_option("--model", score.model, "Checkpoint path")->required();
  score_cmd->add_option("--data", score.data, "Input CSV")->required();
  score_cmd->add_option("--label-column", score.label_column, "Dropped from features if present")
      ->capture_default_str();
  score_cmd->add_option("--out", score.out, "Scores CSV")->required();

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "ROC-AUC and PR-AUC of a score file");
  eval_cmd->add_option("--scores", eval.scores, "Scores CSV")->required();
  eval_cmd->add_option("--score-column", eval.score_column)->capture_default_str();
  eval_cmd->add_option("--labels", eval.labels, "Labelled CSV (default: the scores file)");
  eval_cmd->add_option("--label-column", eval.label_column)->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Recorded in the result")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Result JSON (default: stdout)");

  SweepFlags sweep_w;
  sweep_w.grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  SweepFlags sweep_noise;
  sweep_noise.grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  auto add_sweep = [&](const char* name, const char* help, SweepFlags& f) {
    auto* cmd = app.add_subcommand(name, help);
    add_synthetic_flags(cmd, f.synthetic);
    add_labelgen_flags(cmd, f.labelgen);
    add_model_flags(cmd, f.model);
    cmd->add_option("--grid", f.grid, "Comma separated values")->delimiter(',')->capture_default_str();
    cmd->add_option("--repeats", f.repeats)->capture_default_str();
    cmd->add_option("--seed", f.seed, "First trial seed")->capture_default_str();
    cmd->add_option("--test-fraction", f.test_fraction)->capture_default_str();
    cmd->add_option("--out", f.out, "Long-form CSV")->required();
    cmd->add_flag("--resume", f.resume, "Keep rows already in --out and compute the rest");
    return cmd;
  };
  auto* sweep_w_cmd = add_sweep("sweep-w", "PR/ROC-AUC across loss weights w", sweep_w);
  auto* sweep_noise_cmd =
      add_sweep("sweep-noise", "PR/ROC-AUC across label-generation noise levels", sweep_noise);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare detectors over repeated splits");
  bench_cmd->add_option("--data", bench.data, "Labelled CSV files (default: synthetic)");
  bench_cmd->add_option("--label-column", bench.label_column)->capture_default_str();
  add_synthetic_flags(bench_cmd, bench.synthetic);
  add_labelgen_flags(bench_cmd, bench.labelgen);
  add_model_flags(bench_cmd, bench.model);
  bench_cmd->add_option("--detectors", bench.detectors, "anorand,knn,pca,external:<path>")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench.repeats)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "First trial seed")->capture_default_str();
  bench_cmd->add_option("--test-fraction", bench.test_fraction)->capture_default_str();
  bench_cmd->add_option("--knn-k", bench.knn_k)->capture_default_str();
  bench_cmd->add_option("--pca-components", bench.pca_components,
                        "0 = smallest count reaching 90% variance")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Per-run comparison CSV")->required();
  bench_cmd->add_option("--ranks-out", bench.ranks_out, "Rank table CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(*generate, gen, out);
    if (train_cmd->parsed()) return cmd_train(*train_cmd, train, out);
    if (score_cmd->parsed()) return cmd_score(*score_cmd, score, out);
    if (eval_cmd->parsed()) return cmd_eval(*eval_cmd, eval, out);
    if (sweep_w_cmd->parsed())
      return cmd_sweep(*sweep_w_cmd, sweep_w, SweepParameter::kLossWeight, out, err);
    if (sweep_noise_cmd->parsed())
      return cmd_sweep(*sweep_noise_cmd, sweep_noise, SweepParameter::kNoiseSigma, out, err);
    if (bench_cmd->parsed()) return cmd_bench(*bench_cmd, bench, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace anorand::cli
