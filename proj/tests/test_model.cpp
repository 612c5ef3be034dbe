#include <gtest/gtest.h>

#include <cmath>

#include "anorand/checkpoint.hpp"
#include "anorand/errors.hpp"
#include "anorand/loss.hpp"
#include "anorand/model.hpp"
#include "support.hpp"

namespace anorand {
namespace {

using testing::model_gradient_error;
using testing::random_matrix;
using testing::tiny_config;

std::vector<double> random_targets(Rng& rng, std::size_t n) {
  std::vector<double> t(n);
  for (auto& v : t) v = static_cast<double>(rng.index(2));
  t[0] = 0.0;
  t[n - 1] = 1.0;
  return t;
}

TEST(ModelGradient, SemiSupervisedMatchesFiniteDifferences) {
  for (double w : {0.0, 0.2, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      AnoRandModel model(tiny_config(TrainingMode::kSemiSupervised, w, seed));
      Rng rng(seed + 100);
      testing::jitter_parameters(model, rng);
      const Matrix batch = random_matrix(rng, 5, 3);
      EXPECT_LT(model_gradient_error(model, batch, random_targets(rng, 5)), 1e-4)
          << "w=" << w << " seed=" << seed;
    }
  }
}

TEST(ModelGradient, SupervisedMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    AnoRandModel model(tiny_config(TrainingMode::kSupervised, 0.3, seed));
    Rng rng(seed + 200);
    testing::jitter_parameters(model, rng);
    const Matrix batch = random_matrix(rng, 5, 3);
    EXPECT_LT(model_gradient_error(model, batch, random_targets(rng, 5)), 1e-4) << seed;
  }
}

TEST(ModelGradient, PureNoiseDetectionLossLeavesAutoencoderUntouched) {
  ModelConfig cfg = tiny_config(TrainingMode::kSemiSupervised, 1.0, 4);
  cfg.input_dim = 6;
  cfg.ffp_hidden = {8, 4};
  AnoRandModel model(cfg);
  Rng rng(9);
  const Matrix batch = random_matrix(rng, 16, 6);
  const LossGradient lg = model.loss_and_gradient(batch, random_targets(rng, 16));
  for (const ParameterBlock& b : model.parameter_blocks()) {
    double norm = 0.0;
    for (std::size_t i = b.offset; i < b.offset + b.size; ++i) norm += std::abs(lg.gradient[i]);
    if (b.name == "ffp" || b.name == "head") {
      EXPECT_GT(norm, 0.0) << b.name;
    } else {
      EXPECT_EQ(norm, 0.0) << b.name;
    }
  }
}

TEST(Model, ForwardShapesAndRanges) {
  ModelConfig cfg;
  cfg.input_dim = 10;
  AnoRandModel model(cfg);
  Rng rng(1);
  const Matrix batch = random_matrix(rng, 7, 10, -3, 3);
  const ForwardResult r = model.forward(batch);
  ASSERT_EQ(r.y_nd.size(), 7u);
  ASSERT_EQ(r.y_ae.size(), 7u);
  EXPECT_EQ(r.x_hat.rows(), 7u);
  EXPECT_EQ(r.x_hat.cols(), 10u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_GT(r.y_nd[i], 0.0);
    EXPECT_LT(r.y_nd[i], 1.0);
    EXPECT_GE(r.y_ae[i], 0.5);
    EXPECT_LT(r.y_ae[i], 1.0);
  }
  EXPECT_THROW(model.forward(Matrix(2, 9)), DimensionError);
}

TEST(Model, PerfectReconstructionGivesHalf) {
  const Matrix x = Matrix::from_rows({{1, 2, 3}});
  EXPECT_EQ(sigmoid(row_mse(x, x)[0]), 0.5);
}

TEST(Model, ParameterCountIsAFunctionOfConfig) {
  ModelConfig cfg = tiny_config(TrainingMode::kSemiSupervised, 0.2, 0);
  // ffp 3→4→2, head 2→1, encoder 3→4→2, fusion 4→2, decoder 2→4→3
  const std::size_t want = (12 + 4) + (8 + 2) + (2 + 1) + (12 + 4) + (8 + 2) + (8 + 2) +
                           (8 + 4) + (12 + 3);
  EXPECT_EQ(parameter_count(cfg), want);
  EXPECT_EQ(AnoRandModel(cfg).parameter_count(), want);
  cfg.seed = 77;
  EXPECT_EQ(AnoRandModel(cfg).flat_parameters().size(), want);
  cfg.mode = TrainingMode::kSupervised;
  // head reads the 2-wide latent: same count.
  EXPECT_EQ(parameter_count(cfg), want);
}

TEST(Model, ConfigValidation) {
  ModelConfig cfg;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg.input_dim = 3;
  cfg.loss_weight = 1.5;
  EXPECT_THROW(AnoRandModel{cfg}, ArgumentError);
  cfg.loss_weight = 0.2;
  cfg.ffp_hidden = {};
  EXPECT_THROW(AnoRandModel{cfg}, ArgumentError);
  EXPECT_EQ(training_mode_from_string("supervised"), TrainingMode::kSupervised);
  EXPECT_THROW(training_mode_from_string("unsupervised"), ArgumentError);
}

TEST(JointLoss, Boundaries) {
  const std::vector<double> y_nd{0.2, 0.9}, y_ae{0.6, 0.7}, t{0, 1};
  const JointLoss l1 = joint_loss(y_nd, y_ae, t, 1.0);
  EXPECT_EQ(l1.total, l1.ce_nd);
  const JointLoss l0 = joint_loss(y_nd, y_ae, t, 0.0);
  EXPECT_EQ(l0.total, l0.ce_ae);
  const JointLoss l = joint_loss(y_nd, y_ae, t, 0.2);
  EXPECT_NEAR(l.total, 0.2 * l.ce_nd + 0.8 * l.ce_ae, 1e-15);
  // ce_nd = 1.0, ce_ae = 0.5 reproduced through single probabilities.
  const std::vector<double> p1{std::exp(-1.0)}, p2{std::exp(-0.5)}, one{1.0};
  EXPECT_NEAR(joint_loss(p1, p2, one, 0.2).total, 0.6, 1e-12);
}

TEST(Alpha, QuantileByInterpolation) {
  const std::vector<double> v{0.4, 0.1, 0.3, 0.2};
  EXPECT_NEAR(quantile(v, 0.75), 0.325, 1e-15);
  EXPECT_EQ(quantile(std::vector<double>{5.0}, 0.75), 5.0);
}

// Quantile from its definition: the value at fractional rank q·(n−1).
TEST(Alpha, QuantileMatchesDefinitionOnRandomData) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(40);
    std::vector<double> v(n);
    for (auto& x : v) x = std::round(rng.uniform() * 10) / 10;
    const double q = rng.uniform();
    const double pos = q * static_cast<double>(n - 1);
    // k-th smallest by counting, no sort.
    auto kth = [&](std::size_t k) {
      for (double c : v) {
        std::size_t below = 0, equal = 0;
        for (double o : v) below += o < c, equal += o == c;
        if (below <= k && k < below + equal) return c;
      }
      return std::nan("");
    };
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double want = kth(lo) + (pos - static_cast<double>(lo)) * (kth(hi) - kth(lo));
    EXPECT_NEAR(quantile(v, q), want, 1e-12);
  }
}

TEST(Alpha, Examples) {
  const std::vector<double> ae(4, 0.6), nd(4, 0.2);
  EXPECT_NEAR(compute_alpha(nd, ae), 0.25, 1e-15);
  EXPECT_EQ(compute_alpha(ae, ae), 0.5);
  const std::vector<double> zeros(3, 0.0);
  EXPECT_EQ(compute_alpha(zeros, zeros), 0.5);
}

TEST(Fusion, Examples) {
  const ScoreReport r = fuse_scores({0.4}, {0.8}, 0.5);
  EXPECT_NEAR(r.y_fused[0], 0.6, 1e-15);
  EXPECT_EQ(fuse_scores({0.3}, {0.9}, 0.0).y_fused[0], 0.3);
  EXPECT_EQ(fuse_scores({0.3}, {0.9}, 1.0).y_fused[0], 0.9);
  EXPECT_THROW(fuse_scores({0.3}, {0.9}, 1.5), ArgumentError);
}

TEST(Fusion, MonotoneInNoiseScore) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = rng.uniform() * 0.999;
    const double ae = 0.5 + 0.5 * rng.uniform();
    const double a = rng.uniform(), b = rng.uniform();
    if (a == b) continue;
    const auto r = fuse_scores({a, b}, {ae, ae}, alpha);
    EXPECT_EQ(a < b, r.y_fused[0] < r.y_fused[1]);
    EXPECT_GT(r.y_fused[0], 0.0);
    EXPECT_LT(r.y_fused[0], 1.0);
  }
}

// Two Gaussian blobs 10σ apart in 4 dimensions.
LabeledTrainingSet separable_set(std::uint64_t seed, std::size_t n = 500) {
  Rng rng(seed);
  LabeledTrainingSet ts;
  ts.features = Matrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i < n / 10 ? 1 : 0;
    ts.labels.push_back(label);
    ts.provenance.push_back(label ? Provenance::kSelectedSeed : Provenance::kOriginalNormal);
    ts.origin.push_back(i);
    for (std::size_t j = 0; j < 4; ++j) ts.features(i, j) = rng.normal() + (label ? 5.0 : -5.0) / 2;
  }
  return ts;
}

TEST(Fit, HistoryLengthAndProgress) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelConfig cfg;
    cfg.input_dim = 4;
    cfg.epochs = 20;
    cfg.seed = seed;
    AnoRandModel model(cfg);
    const auto history = model.fit(separable_set(seed));
    ASSERT_EQ(history.size(), 20u);
    improved += history.back().total < history.front().total;
  }
  EXPECT_GE(improved, 6);
}

TEST(Fit, AlphaFrozenFromTrainingScores) {
  ModelConfig cfg;
  cfg.input_dim = 4;
  cfg.epochs = 3;
  AnoRandModel model(cfg);
  const LabeledTrainingSet ts = separable_set(1, 200);
  model.fit(ts);
  const ForwardResult f = model.forward(ts.features);
  EXPECT_EQ(model.alpha(), compute_alpha(f.y_nd, f.y_ae));
  Rng rng(2);
  const Matrix other = random_matrix(rng, 9, 4);
  const ScoreReport r = model.score(other);
  EXPECT_EQ(r.alpha, model.alpha());
  for (std::size_t i = 0; i < 9; ++i)
    EXPECT_NEAR(r.y_fused[i], (1 - r.alpha) * r.y_nd[i] + r.alpha * r.y_ae[i], 1e-15);
}

TEST(Fit, DeterministicParameters) {
  auto train = [] {
    ModelConfig cfg;
    cfg.input_dim = 4;
    cfg.epochs = 5;
    cfg.seed = 21;
    AnoRandModel model(cfg);
    model.fit(separable_set(3, 300));
    return model.flat_parameters();
  };
  EXPECT_EQ(train(), train());
}

TEST(Fit, ModeMismatchIsAStateError) {
  ModelConfig cfg;
  cfg.input_dim = 4;
  cfg.mode = TrainingMode::kSupervised;
  AnoRandModel sup(cfg);
  EXPECT_THROW(sup.fit(separable_set(0, 50)), StateError);
  cfg.mode = TrainingMode::kSemiSupervised;
  AnoRandModel semi(cfg);
  Dataset ds;
  ds.features = Matrix(3, 4);
  ds.labels = std::vector<int>{0, 1, 0};
  EXPECT_THROW(semi.fit_supervised(ds), StateError);
}

Dataset as_dataset(const LabeledTrainingSet& ts) {
  Dataset ds;
  ds.features = ts.features;
  ds.labels = ts.labels;
  for (std::size_t j = 0; j < ts.features.cols(); ++j) ds.feature_names.push_back("f");
  return ds;
}

TEST(Supervised, LossBoundaries) {
  ModelConfig cfg = tiny_config(TrainingMode::kSupervised, 0.0, 5);
  AnoRandModel model(cfg);
  Rng rng(5);
  const Matrix batch = random_matrix(rng, 6, 3);
  const auto t = random_targets(rng, 6);
  const LossGradient lg = model.loss_and_gradient(batch, t);
  EXPECT_EQ(lg.loss.total, lg.loss.ce_nd);
  EXPECT_NEAR(lg.loss.ce_nd, bce_loss(model.forward(batch).y_nd, t), 1e-15);
  EXPECT_EQ(mae_loss(batch, batch), 0.0);
}

TEST(Supervised, TrainingReducesBce) {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelConfig cfg;
    cfg.input_dim = 4;
    cfg.epochs = 20;
    cfg.mode = TrainingMode::kSupervised;
    cfg.seed = seed;
    AnoRandModel model(cfg);
    const auto history = model.fit_supervised(as_dataset(separable_set(seed)));
    improved += history.back().prediction < history.front().prediction;
    EXPECT_EQ(model.alpha(), 0.0);
  }
  EXPECT_GE(improved, 8);
}

TEST(Supervised, ScoreIsTheHeadOutput) {
  ModelConfig cfg = tiny_config(TrainingMode::kSupervised, 0.2, 1);
  cfg.epochs = 2;
  AnoRandModel model(cfg);
  Rng rng(1);
  LabeledTrainingSet ts = separable_set(4, 60);
  ts.features = ts.features.slice_cols(0, 3);
  model.fit_supervised(as_dataset(ts));
  const ScoreReport r = model.score(ts.features, 0.7);
  EXPECT_EQ(r.y_fused, r.y_nd);
}

TEST(Checkpoint, RoundTripScoresBitExact) {
  testing::TempDir dir("ckpt");
  ModelConfig cfg;
  cfg.input_dim = 4;
  cfg.epochs = 3;
  cfg.seed = 8;
  AnoRandModel model(cfg);
  const LabeledTrainingSet ts = separable_set(2, 200);
  model.fit(ts);
  const Checkpoint cp{model, {0.5, -1, 2, 3}, {1, 2, 3, 4}};
  save_checkpoint(dir / "m.json", cp);
  const Checkpoint back = load_checkpoint(dir / "m.json");
  EXPECT_EQ(back.model.flat_parameters(), model.flat_parameters());
  EXPECT_EQ(back.model.alpha(), model.alpha());
  EXPECT_EQ(back.feature_means, cp.feature_means);
  EXPECT_EQ(back.feature_stds, cp.feature_stds);
  EXPECT_EQ(back.model.config().loss_weight, cfg.loss_weight);
  const ScoreReport a = model.score(ts.features);
  const ScoreReport b = back.model.score(ts.features);
  EXPECT_EQ(a.y_fused, b.y_fused);
  EXPECT_EQ(a.y_ae, b.y_ae);
}

TEST(Checkpoint, Errors) {
  testing::TempDir dir("ckpt_err");
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), IoError);
  testing::spit(dir / "junk.json", "{not json");
  EXPECT_THROW(load_checkpoint(dir / "junk.json"), ParseError);
  testing::spit(dir / "other.json", R"({"format": "something-else"})");
  EXPECT_THROW(load_checkpoint(dir / "other.json"), ValidationError);
}

}  // namespace
}  // namespace anorand
