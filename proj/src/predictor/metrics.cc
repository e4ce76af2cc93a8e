#include "hdpd/predictor/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hdpd/common/error.h"

namespace hdpd::predictor {

double Auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw ComputationError("AUC needs both classes");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

double F1(const ConfusionCounts& c) {
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  return denom == 0.0 ? 0.0 : 2.0 * c.tp / denom;
}

double LogLoss(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) throw InvalidArgument("probs and labels differ in length");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], 1e-15, 1.0 - 1e-15);
    sum -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

double BestF1Threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  const long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0) throw ComputationError("no positive labels for F1 threshold");
  // Walk distinct scores from the highest down; at each candidate tau the
  // predicted-positive set is every score >= tau.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  long tp = 0, fp = 0;
  double best_f1 = -1.0, best_tau = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    const double tau = scores[order[i]];
    while (j < order.size() && scores[order[j]] == tau) {
      (labels[order[j]] == 1 ? tp : fp)++;
      ++j;
    }
    const double f1 = 2.0 * tp / (2.0 * tp + fp + (positives - tp));
    // Descending walk: >= keeps the smallest threshold among ties.
    if (f1 >= best_f1) {
      best_f1 = f1;
      best_tau = tau;
    }
    i = j;
  }
  return best_tau;
}

}  // namespace hdpd::predictor
