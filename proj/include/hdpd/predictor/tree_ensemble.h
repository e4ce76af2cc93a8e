#ifndef HDPD_PREDICTOR_TREE_ENSEMBLE_H_
#define HDPD_PREDICTOR_TREE_ENSEMBLE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

namespace hdpd::predictor {

// Either an internal split or a leaf. Rows go left iff value < threshold;
// missing values (NaN) follow `missing_left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double leaf = 0.0;  // additive margin contribution
  double gain = 0.0;  // loss reduction of the split, for importance

  bool is_leaf() const { return feature < 0; }
};

// Node 0 is the root.
using Tree = std::vector<TreeNode>;

double Logistic(double margin);

// Binary-logistic additive tree model:
// probability = logistic(base_score + sum of reached leaf values).
struct TreeEnsemble {
  std::vector<std::string> features;
  double base_score = 0.0;
  std::vector<Tree> trees;

  // Throws InvalidArgument when a child index is out of range, a node is
  // reachable twice (cycle or shared child) or a feature index is invalid.
  void Validate() const;

  // Throws InvalidArgument when x.size() != features.size().
  double Margin(std::span<const double> x) const;
  double PredictProba(std::span<const double> x) const;

  // Total split gain per feature (aligned with `features`).
  std::vector<double> FeatureImportance() const;
};

// Ensemble plus the onset decision threshold tau: onset iff probability >= tau.
struct FittedModel {
  TreeEnsemble ensemble;
  double threshold = 0.5;
  std::map<std::string, double> importances;

  const std::vector<std::string>& features() const { return ensemble.features; }
  double Predict(std::span<const double> x) const { return ensemble.PredictProba(x); }
  bool PredictOnset(std::span<const double> x) const { return Predict(x) >= threshold; }
};

}  // namespace hdpd::predictor

#endif  // HDPD_PREDICTOR_TREE_ENSEMBLE_H_
