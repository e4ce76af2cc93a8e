#ifndef HDPD_PREDICTOR_MODEL_SELECTION_H_
#define HDPD_PREDICTOR_MODEL_SELECTION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdpd/common/matrix.h"
#include "hdpd/predictor/gbdt_trainer.h"

namespace hdpd::predictor {

// Fold id per row such that all rows of a participant share a fold. Sorted
// unique participants are shuffled with `seed` and dealt round-robin.
// Throws InvalidArgument when there are fewer participants than folds.
std::vector<int> ParticipantFolds(std::span<const std::string> participants, int folds,
                                  std::uint64_t seed);

// Out-of-fold predictions of one cross-validation run.
struct FoldResult {
  std::vector<std::size_t> validation_rows;
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<double> importance;  // aligned with the training columns
  bool trained = false;            // false when the training part was single-class
};

std::vector<FoldResult> CrossValidate(const Matrix& x, std::span<const int> y,
                                      std::span<const std::string> participants,
                                      const TrainConfig& config, int folds,
                                      std::uint64_t seed);

struct ThresholdSelection {
  double threshold = 0.5;
  std::vector<double> fold_thresholds;
  std::vector<int> skipped_folds;
};

// Per fold, the best-F1 threshold on the validation scores; the result is the
// median over folds (lower middle on even counts). Folds without positive
// validation labels are skipped with a warning; throws ComputationError when
// every fold is skipped.
ThresholdSelection ThresholdFromFolds(std::span<const FoldResult> folds);

ThresholdSelection SelectThresholdCv(const Matrix& x, std::span<const int> y,
                                     std::span<const std::string> participants,
                                     const TrainConfig& config, int folds = 5,
                                     std::uint64_t seed = 0);

// Mean validation AUC over folds with both classes; NaN when none qualify.
double MeanFoldAuc(std::span<const FoldResult> folds);

struct RfeStep {
  std::size_t n_features = 0;
  double cv_auc = 0.0;
  std::vector<std::string> removed;  // dropped after evaluating this count
};

struct RfeResult {
  std::vector<std::size_t> selected;  // column indices, ascending
  std::vector<RfeStep> trace;
  bool aborted = false;
};

// Recursive feature elimination: evaluate CV AUC at the current feature set,
// drop the `step` features with the lowest fold-averaged total gain (ties drop
// the later column), repeat until `target` features remain. With step 1 the
// trace has initial - target + 1 entries. Training failure mid-loop aborts and
// returns the partial trace.
RfeResult Rfe(const Matrix& x, std::span<const int> y,
              std::span<const std::string> participants,
              std::span<const std::string> feature_names, const TrainConfig& config,
              std::size_t target = 25, int folds = 5, std::uint64_t seed = 0,
              std::size_t step = 1);

// Picks the configuration with the highest mean fold AUC (first on ties).
std::size_t GridSearch(const Matrix& x, std::span<const int> y,
                       std::span<const std::string> participants,
                       std::span<const TrainConfig> candidates, int folds = 5,
                       std::uint64_t seed = 0);

}  // namespace hdpd::predictor

#endif  // HDPD_PREDICTOR_MODEL_SELECTION_H_
