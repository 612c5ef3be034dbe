#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace anorand {

// ROC-AUC as the Mann–Whitney statistic with average ranks for ties:
// P(score_pos > score_neg) + 0.5 · P(tie).
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Average precision: mean over positives of the precision at each
// positive's rank, ranking by descending score with ties broken by the
// original index.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

// Quadratic pairwise ROC-AUC; reference implementation for n <= 1e4.
double brute_force_auc(std::span<const double> scores, std::span<const int> labels);

struct EvalResult {
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Both metrics plus class counts. Throws UndefinedMetricError unless both
// classes are present.
EvalResult evaluate(std::span<const double> scores, std::span<const int> labels);

}  // namespace anorand
