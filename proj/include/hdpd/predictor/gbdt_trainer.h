#ifndef HDPD_PREDICTOR_GBDT_TRAINER_H_
#define HDPD_PREDICTOR_GBDT_TRAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdpd/common/matrix.h"
#include "hdpd/predictor/tree_ensemble.h"

namespace hdpd::predictor {

struct TrainConfig {
  int rounds = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
  double min_split_gain = 0.0;
  // Row fraction drawn (without replacement) per round; 1 disables sampling.
  double subsample = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Reference gradient-boosted trainer for the logistic loss. Splits are exact
// greedy second-order splits:
//   gain = 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)]
// over every midpoint between consecutive distinct values. Missing values go
// to whichever side gives the larger gain (left on ties). A node splits when
// its best gain is at least min_split_gain, zero included. Leaves are
// -lr * G/(H+l). The base score is the log-odds of the training prevalence.
//
// Throws InvalidArgument on shape mismatch or < 2 rows, ComputationError when
// labels are single-class. If `loss_trace` is given it receives the training
// log-loss before the first round and after every round.
TreeEnsemble TrainGbdt(const Matrix& x, std::span<const int> y,
                       const TrainConfig& config,
                       std::vector<std::string> feature_names = {},
                       std::vector<double>* loss_trace = nullptr);

}  // namespace hdpd::predictor

#endif  // HDPD_PREDICTOR_GBDT_TRAINER_H_
