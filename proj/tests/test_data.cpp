#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "anorand/data.hpp"
#include "anorand/errors.hpp"
#include "support.hpp"

namespace anorand {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;

TEST(Synthetic, MinorityCountAtDefaultScale) {
  SyntheticOptions o;
  o.n = 20000;
  o.imbalance = 0.05;
  o.seed = 1;
  const Dataset ds = generate_synthetic(o);
  EXPECT_EQ(ds.rows(), 20000u);
  EXPECT_EQ(ds.cols(), 20u);
  EXPECT_NEAR(static_cast<double>(ds.count_label(1)), 1000.0, 1.0);
  EXPECT_NO_THROW(ds.validate());
}

TEST(Synthetic, LabelNoisePreservesClassCounts) {
  SyntheticOptions o;
  o.n = 2000;
  o.flip_fraction = 0.2;
  o.seed = 4;
  const SyntheticData sd = generate_synthetic_detailed(o);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < sd.clean_labels.size(); ++i) {
    flipped += sd.clean_labels[i] != (*sd.dataset.labels)[i];
  }
  EXPECT_EQ(sd.dataset.count_label(1), 100u);
  EXPECT_GT(flipped, 0u);
  EXPECT_LE(flipped, 200u);
}

// Nearest centroid over the unmixed cluster coordinates.
TEST(Synthetic, WellSeparatedClustersAreNearestCentroidSeparable) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SyntheticOptions o;
    o.n = 1000;
    o.d = 5;
    o.class_sep = 100.0;
    o.flip_fraction = 0.0;
    o.seed = seed;
    const SyntheticData sd = generate_synthetic_detailed(o);
    const Matrix& x = sd.cluster_coordinates;
    const Matrix& c = sd.centroids;
    ASSERT_EQ(c.rows(), 2u);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t k = 0; k < c.rows(); ++k) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < c.cols(); ++j) d2 += std::pow(x(i, j) - c(k, j), 2);
        if (d2 < best_d) best_d = d2, best = k;
      }
      ASSERT_EQ(static_cast<int>(best), (*sd.dataset.labels)[i]) << "row " << i;
    }
  }
}

TEST(Synthetic, DeterministicAndValidated) {
  SyntheticOptions o;
  o.n = 500;
  o.seed = 9;
  EXPECT_EQ(generate_synthetic(o).features, generate_synthetic(o).features);
  o.seed = 10;
  SyntheticOptions p = o;
  p.seed = 9;
  EXPECT_NE(generate_synthetic(o).features, generate_synthetic(p).features);
  o.imbalance = 0.9;
  EXPECT_THROW(generate_synthetic(o), ArgumentError);
  o.imbalance = 0.05;
  o.n_informative = 30;
  EXPECT_THROW(generate_synthetic(o), ArgumentError);
}

TEST(Csv, ReadsLabelledFile) {
  TempDir dir("csv");
  spit(dir / "a.csv", "a,b,label\n1,2,0\n3,4,0\n5.5,-6e-1,1\n");
  const Dataset ds = load_csv(dir / "a.csv", std::string("label"));
  EXPECT_EQ(ds.rows(), 3u);
  EXPECT_EQ(ds.cols(), 2u);
  EXPECT_EQ(*ds.labels, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(ds.features(2, 1), -0.6);
  const Dataset unlabelled = load_csv(dir / "a.csv");
  EXPECT_EQ(unlabelled.cols(), 3u);
  EXPECT_FALSE(unlabelled.has_labels());
}

TEST(Csv, Errors) {
  TempDir dir("csv_err");
  spit(dir / "a.csv", "a,b\n1,2\n");
  EXPECT_THROW(load_csv(dir / "a.csv", std::string("label")), ValidationError);
  spit(dir / "empty.csv", "a,b,label\n");
  try {
    load_csv(dir / "empty.csv", std::string("label"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no rows"), std::string::npos);
  }
  spit(dir / "bad.csv", "a,b\n1,x\n");
  EXPECT_THROW(load_csv(dir / "bad.csv"), ParseError);
  spit(dir / "ragged.csv", "a,b\n1\n");
  EXPECT_THROW(load_csv(dir / "ragged.csv"), ParseError);
  spit(dir / "lab.csv", "a,label\n1,2\n");
  EXPECT_THROW(load_csv(dir / "lab.csv", std::string("label")), ValidationError);
  EXPECT_THROW(load_csv(dir / "missing.csv"), IoError);
}

TEST(Csv, WriteReadRoundTripIsExact) {
  TempDir dir("csv_rt");
  SyntheticOptions o;
  o.n = 200;
  o.d = 4;
  o.seed = 3;
  const Dataset ds = generate_synthetic(o);
  write_csv(ds, dir / "x.csv");
  const Dataset back = load_csv(dir / "x.csv", std::string("label"));
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  write_csv(back, dir / "y.csv");
  EXPECT_EQ(slurp(dir / "x.csv"), slurp(dir / "y.csv"));
}

TEST(Standardize, Examples) {
  Dataset train;
  train.features = Matrix::from_rows({{2, 5}, {4, 5}});
  train.feature_names = {"a", "b"};
  Dataset test;
  test.features = Matrix::from_rows({{3, 7}});
  test.feature_names = {"a", "b"};
  const StandardizedSets z = standardize(train, {test});
  EXPECT_DOUBLE_EQ(z.train.features(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z.train.features(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z.train.features(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(z.others[0].features(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(z.others[0].features(0, 1), 7.0);
}

TEST(Standardize, TrainingColumnsHaveZeroMeanUnitStd) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds;
    const std::size_t n = 2 + rng.index(200), d = 1 + rng.index(6);
    ds.features = testing::random_matrix(rng, n, d, -50.0, 80.0);
    for (std::size_t r = 0; r < n; ++r) ds.features(r, 0) *= 1e3;
    ds.feature_names.resize(d, "f");
    const Matrix z = standardize(ds).train.features;
    for (std::size_t c = 0; c < d; ++c) {
      double m = 0, v = 0;
      for (std::size_t r = 0; r < n; ++r) m += z(r, c);
      m /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) v += (z(r, c) - m) * (z(r, c) - m);
      EXPECT_NEAR(m, 0.0, 1e-9);
      EXPECT_NEAR(std::sqrt(v / static_cast<double>(n)), 1.0, 1e-9);
    }
  }
}

Dataset labelled(std::size_t n, std::size_t positives) {
  Dataset ds;
  ds.features = Matrix(n, 1);
  ds.feature_names = {"x"};
  ds.labels = std::vector<int>(n, 0);
  for (std::size_t i = 0; i < n; ++i) ds.features(i, 0) = static_cast<double>(i);
  for (std::size_t i = 0; i < positives; ++i) (*ds.labels)[i * (n / positives)] = 1;
  return ds;
}

TEST(Split, StratifiedExample) {
  const SplitResult s = split(labelled(100, 5), SplitSpec{0.2, true, 1});
  EXPECT_EQ(s.test.count_label(1), 1u);
  EXPECT_EQ(s.test.rows(), 20u);
  EXPECT_EQ(s.train.count_label(1), 4u);
}

TEST(Split, PartitionsRowsDeterministically) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 20 + rng.index(300);
    const Dataset ds = labelled(n, 1 + rng.index(n / 4));
    const SplitSpec spec{0.05 + 0.9 * rng.uniform(), rng.index(2) == 0, rng.next_u64()};
    const SplitResult a = split(ds, spec);
    const SplitResult b = split(ds, spec);
    EXPECT_EQ(a.test_indices, b.test_indices);
    std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
    for (std::size_t i : a.test_indices) EXPECT_TRUE(all.insert(i).second) << "overlap at " << i;
    EXPECT_EQ(all.size(), n);
    EXPECT_TRUE(std::is_sorted(a.test_indices.begin(), a.test_indices.end()));
  }
  EXPECT_THROW(split(labelled(10, 2), SplitSpec{1.0, true, 0}), ArgumentError);
}

}  // namespace
}  // namespace anorand
