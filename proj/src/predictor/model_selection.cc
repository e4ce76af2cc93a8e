#include "hdpd/predictor/model_selection.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"
#include "hdpd/predictor/metrics.h"

namespace hdpd::predictor {

std::vector<int> ParticipantFolds(std::span<const std::string> participants, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross-validation needs >= 2 folds");
  std::vector<std::string> ids(participants.begin(), participants.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < static_cast<std::size_t>(folds)) {
    throw InvalidArgument("fewer participants than folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < ids.size(); ++i) fold_of[ids[i]] = static_cast<int>(i % folds);
  std::vector<int> out;
  out.reserve(participants.size());
  for (const auto& p : participants) out.push_back(fold_of.at(p));
  return out;
}

std::vector<FoldResult> CrossValidate(const Matrix& x, std::span<const int> y,
                                      std::span<const std::string> participants,
                                      const TrainConfig& config, int folds,
                                      std::uint64_t seed) {
  if (participants.size() != x.rows() || y.size() != x.rows()) {
    throw InvalidArgument("X, y and participants differ in length");
  }
  const auto fold_of = ParticipantFolds(participants, folds, seed);
  std::vector<FoldResult> results(folds);
  for (int k = 0; k < folds; ++k) {
    std::vector<std::size_t> train;
    FoldResult& r = results[k];
    for (std::size_t i = 0; i < x.rows(); ++i) {
      (fold_of[i] == k ? r.validation_rows : train).push_back(i);
    }
    std::vector<int> y_train;
    for (const auto i : train) y_train.push_back(y[i]);
    for (const auto i : r.validation_rows) r.labels.push_back(y[i]);
    const long pos = std::count(y_train.begin(), y_train.end(), 1);
    if (train.size() < 2 || pos == 0 || pos == static_cast<long>(y_train.size())) {
      Log().warn("fold {} has single-class training labels; skipped", k);
      continue;
    }
    const Matrix x_train = x.SelectRows(train);
    const TreeEnsemble model = TrainGbdt(x_train, y_train, config);
    for (const auto i : r.validation_rows) r.scores.push_back(model.PredictProba(x.Row(i)));
    r.importance = model.FeatureImportance();
    r.trained = true;
  }
  return results;
}

ThresholdSelection ThresholdFromFolds(std::span<const FoldResult> folds) {
  ThresholdSelection out;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    const auto& f = folds[k];
    if (!f.trained || std::count(f.labels.begin(), f.labels.end(), 1) == 0) {
      Log().warn("fold {} has no positive validation labels; skipped for threshold", k);
      out.skipped_folds.push_back(static_cast<int>(k));
      continue;
    }
    out.fold_thresholds.push_back(BestF1Threshold(f.scores, f.labels));
  }
  if (out.fold_thresholds.empty()) {
    throw ComputationError("every fold was skipped during threshold selection");
  }
  out.threshold = LowerMedian(out.fold_thresholds);
  return out;
}

ThresholdSelection SelectThresholdCv(const Matrix& x, std::span<const int> y,
                                     std::span<const std::string> participants,
                                     const TrainConfig& config, int folds,
                                     std::uint64_t seed) {
  const auto results = CrossValidate(x, y, participants, config, folds, seed);
  return ThresholdFromFolds(results);
}

double MeanFoldAuc(std::span<const FoldResult> folds) {
  double sum = 0.0;
  int count = 0;
  for (const auto& f : folds) {
    if (!f.trained) continue;
    const long pos = std::count(f.labels.begin(), f.labels.end(), 1);
    if (pos == 0 || pos == static_cast<long>(f.labels.size())) continue;
    sum += Auc(f.scores, f.labels);
    ++count;
  }
  return count == 0 ? std::nan("") : sum / count;
}

RfeResult Rfe(const Matrix& x, std::span<const int> y,
              std::span<const std::string> participants,
              std::span<const std::string> feature_names, const TrainConfig& config,
              std::size_t target, int folds, std::uint64_t seed, std::size_t step) {
  if (feature_names.size() != x.cols()) {
    throw InvalidArgument("feature name count does not match X width");
  }
  if (target < 1 || target > x.cols()) {
    throw InvalidArgument("RFE target must lie in [1, feature count]");
  }
  if (step < 1) throw InvalidArgument("RFE step must be >= 1");
  RfeResult result;
  result.selected.resize(x.cols());
  std::iota(result.selected.begin(), result.selected.end(), 0);
  while (true) {
    RfeStep entry;
    entry.n_features = result.selected.size();
    std::vector<FoldResult> cv;
    try {
      cv = CrossValidate(x.SelectCols(result.selected), y, participants, config, folds, seed);
    } catch (const Error& e) {
      Log().error("RFE aborted at {} features: {}", entry.n_features, e.what());
      result.aborted = true;
      return result;
    }
    entry.cv_auc = MeanFoldAuc(cv);
    if (result.selected.size() == target) {
      result.trace.push_back(std::move(entry));
      break;
    }
    std::vector<double> mean_importance(result.selected.size(), 0.0);
    int trained = 0;
    for (const auto& f : cv) {
      if (!f.trained) continue;
      ++trained;
      for (std::size_t j = 0; j < mean_importance.size(); ++j) mean_importance[j] += f.importance[j];
    }
    if (trained == 0) {
      Log().error("RFE aborted at {} features: no fold could be trained", entry.n_features);
      result.trace.push_back(std::move(entry));
      result.aborted = true;
      return result;
    }
    for (auto& v : mean_importance) v /= trained;
    const std::size_t drop = std::min(step, result.selected.size() - target);
    std::vector<std::size_t> order(result.selected.size());
    std::iota(order.begin(), order.end(), 0);
    // Lowest importance first; among equals the later column goes first.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (mean_importance[a] != mean_importance[b]) return mean_importance[a] < mean_importance[b];
      return a > b;
    });
    std::vector<std::size_t> removed(order.begin(), order.begin() + drop);
    std::sort(removed.begin(), removed.end());
    for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
      entry.removed.push_back(feature_names[result.selected[*it]]);
      result.selected.erase(result.selected.begin() + static_cast<long>(*it));
    }
    result.trace.push_back(std::move(entry));
  }
  return result;
}

std::size_t GridSearch(const Matrix& x, std::span<const int> y,
                       std::span<const std::string> participants,
                       std::span<const TrainConfig> candidates, int folds,
                       std::uint64_t seed) {
  if (candidates.empty()) throw InvalidArgument("grid search needs candidates");
  std::size_t best = 0;
  double best_auc = -1.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double auc = MeanFoldAuc(CrossValidate(x, y, participants, candidates[c], folds, seed));
    if (auc > best_auc) {
      best_auc = auc;
      best = c;
    }
  }
  return best;
}

}  // namespace hdpd::predictor
