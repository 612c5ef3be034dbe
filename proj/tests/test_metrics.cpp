#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "anorand/errors.hpp"
#include "anorand/metrics.hpp"
#include "anorand/rng.hpp"
#include "metric_oracles.hpp"

namespace anorand {
namespace {

using testing::random_instance;
using testing::reference_average_precision;

TEST(RocAuc, FourSampleExample) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(s, y), 0.75);
  EXPECT_DOUBLE_EQ(brute_force_auc(s, y), 0.75);
}

TEST(RocAuc, PerfectAndTied) {
  const std::vector<int> y{0, 1, 0, 1};
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.9, 0.2, 0.8}, y), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>(4, 0.3), y), 0.5);
  EXPECT_EQ(brute_force_auc(std::vector<double>{0.0, 1.0}, std::vector<int>{0, 1}), 1.0);
  EXPECT_EQ(brute_force_auc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}), 0.5);
}

TEST(RocAuc, MatchesPairwiseOracleWithTies) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, 2 + rng.index(999), 1 + rng.index(20));
    EXPECT_NEAR(roc_auc(inst.scores, inst.labels), brute_force_auc(inst.scores, inst.labels),
                1e-12);
  }
}

TEST(RocAuc, NegatedScoresComplement) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = random_instance(rng, 100, 0);  // continuous: no ties
    std::vector<double> neg(inst.scores.size());
    std::transform(inst.scores.begin(), inst.scores.end(), neg.begin(), std::negate<>());
    EXPECT_NEAR(roc_auc(neg, inst.labels), 1.0 - roc_auc(inst.scores, inst.labels), 1e-12);
  }
}

TEST(Metrics, InvariantUnderIncreasingTransform) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng, 150, 8);
    std::vector<double> e(inst.scores.size());
    std::transform(inst.scores.begin(), inst.scores.end(), e.begin(),
                   [](double x) { return std::exp(x); });
    EXPECT_NEAR(roc_auc(e, inst.labels), roc_auc(inst.scores, inst.labels), 1e-12);
    EXPECT_EQ(pr_auc(e, inst.labels), pr_auc(inst.scores, inst.labels));
  }
}

TEST(PrAuc, FourSampleExample) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_NEAR(pr_auc(s, y), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(PrAuc, PerfectRanking) {
  const std::vector<double> s{0.1, 0.9, 0.2, 0.8, 0.05};
  const std::vector<int> y{0, 1, 0, 1, 0};
  EXPECT_EQ(pr_auc(s, y), 1.0);
}

TEST(PrAuc, MatchesRankByRankOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, 2 + rng.index(400), 1 + rng.index(10));
    EXPECT_EQ(pr_auc(inst.scores, inst.labels),
              reference_average_precision(inst.scores, inst.labels));
  }
}

TEST(PrAuc, RandomScoresApproachPrevalence) {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<double> s(10000);
    std::vector<int> y(10000, 0);
    for (std::size_t i = 0; i < 500; ++i) y[i] = 1;
    for (auto& v : s) v = rng.uniform();
    const double ap = pr_auc(s, y);
    EXPECT_NEAR(ap, 0.05, 0.02) << "seed " << seed;
    sum += ap;
  }
  EXPECT_NEAR(sum / 20.0, 0.05, 0.02);
}

TEST(Evaluate, CountsAndErrors) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  const EvalResult r = evaluate(s, y);
  EXPECT_EQ(r.n_pos, 2u);
  EXPECT_EQ(r.n_neg, 2u);
  EXPECT_DOUBLE_EQ(r.roc_auc, 0.75);
  EXPECT_THROW(evaluate(s, std::vector<int>(4, 0)), UndefinedMetricError);
  EXPECT_THROW(evaluate(s, std::vector<int>(4, 1)), UndefinedMetricError);
  EXPECT_THROW(evaluate(s, std::vector<int>(3, 1)), DimensionError);
  EXPECT_THROW(evaluate(s, std::vector<int>{0, 1, 2, 0}), ValidationError);
}

}  // namespace
}  // namespace anorand
