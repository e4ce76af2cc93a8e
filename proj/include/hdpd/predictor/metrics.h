#ifndef HDPD_PREDICTOR_METRICS_H_
#define HDPD_PREDICTOR_METRICS_H_

#include <span>

namespace hdpd::predictor {

// Rank-based ROC AUC with mid-ranks for ties, i.e.
// P(score+ > score-) + 1/2 P(score+ == score-). Throws ComputationError when
// only one class is present.
double Auc(std::span<const double> scores, std::span<const int> labels);

struct ConfusionCounts {
  long tp = 0;
  long fn = 0;
  long fp = 0;
  long tn = 0;
};

// Positive prediction iff score >= threshold.
ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold);

double F1(const ConfusionCounts& c);

// Mean binary cross-entropy; probabilities are clipped to [1e-15, 1 - 1e-15].
double LogLoss(std::span<const double> probs, std::span<const int> labels);

// Threshold maximising F1 among the distinct scores; ties go to the smallest
// threshold. Throws ComputationError when there are no positive labels.
double BestF1Threshold(std::span<const double> scores, std::span<const int> labels);

}  // namespace hdpd::predictor

#endif  // HDPD_PREDICTOR_METRICS_H_
