#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "adasim/error.hpp"

namespace adasim {

/// Exact ROC AUC via the Mann–Whitney statistic with average ranks, so tied
/// scores count one half. labels are 1 (positive) / 0 (negative).
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("auc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += (y == 1);
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("auc needs at least one positive and one negative");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  return auc(std::span<const double>(scores), std::span<const int>(labels));
}

/// Sample Pearson correlation (two-pass).
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson needs at least two samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(std::span<const double>(x), std::span<const double>(y));
}

}  // namespace adasim
