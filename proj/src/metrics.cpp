#include "anorand/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "anorand/errors.hpp"

namespace anorand {

namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts count_classes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("metric: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
  }
  ClassCounts c;
  for (int l : labels) {
    if (l == 1) {
      ++c.pos;
    } else if (l == 0) {
      ++c.neg;
    } else {
      throw ValidationError("metric: label outside {0,1}: " + std::to_string(l));
    }
  }
  return c;
}

void require_both_classes(const ClassCounts& c) {
  if (c.pos == 0 || c.neg == 0) {
    throw UndefinedMetricError("ROC-AUC needs at least one positive and one negative label (got " +
                               std::to_string(c.pos) + " positives, " + std::to_string(c.neg) +
                               " negatives)");
  }
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts c = count_classes(scores, labels);
  require_both_classes(c);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    i = j + 1;
  }
  const double pos = static_cast<double>(c.pos);
  const double neg = static_cast<double>(c.neg);
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts c = count_classes(scores, labels);
  if (c.pos == 0) throw UndefinedMetricError("average precision needs at least one positive label");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return total / static_cast<double>(c.pos);
}

double brute_force_auc(std::span<const double> scores, std::span<const int> labels) {
  const ClassCounts c = count_classes(scores, labels);
  require_both_classes(c);
  double wins = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

EvalResult evaluate(std::span<const double> scores, std::span<const int> labels) {
  EvalResult r;
  r.roc_auc = roc_auc(scores, labels);
  r.pr_auc = pr_auc(scores, labels);
  const ClassCounts c = count_classes(scores, labels);
  r.n_pos = c.pos;
  r.n_neg = c.neg;
  return r;
}

}  // namespace anorand
