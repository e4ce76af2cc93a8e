#include "hdpd/predictor/tree_ensemble.h"

#include <cmath>

#include "hdpd/common/error.h"

namespace hdpd::predictor {

double Logistic(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

void TreeEnsemble::Validate() const {
  const int n_features = static_cast<int>(features.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const Tree& tree = trees[t];
    if (tree.empty()) throw InvalidArgument("tree " + std::to_string(t) + " is empty");
    const int n = static_cast<int>(tree.size());
    std::vector<bool> visited(tree.size(), false);
    std::vector<int> stack = {0};
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (id < 0 || id >= n) {
        throw InvalidArgument("tree " + std::to_string(t) + ": child index out of range");
      }
      if (visited[id]) {
        throw InvalidArgument("tree " + std::to_string(t) + ": node " +
                              std::to_string(id) + " reachable twice");
      }
      visited[id] = true;
      const TreeNode& node = tree[id];
      if (node.is_leaf()) continue;
      if (node.feature >= n_features) {
        throw InvalidArgument("tree " + std::to_string(t) + ": feature index " +
                              std::to_string(node.feature) + " out of range");
      }
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
}

double TreeEnsemble::Margin(std::span<const double> x) const {
  if (x.size() != features.size()) {
    throw InvalidArgument("feature vector has length " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(features.size()));
  }
  double margin = base_score;
  for (const Tree& tree : trees) {
    int id = 0;
    while (!tree[id].is_leaf()) {
      const TreeNode& node = tree[id];
      const double v = x[node.feature];
      const bool go_left = std::isnan(v) ? node.missing_left : v < node.threshold;
      id = go_left ? node.left : node.right;
    }
    margin += tree[id].leaf;
  }
  return margin;
}

double TreeEnsemble::PredictProba(std::span<const double> x) const {
  return Logistic(Margin(x));
}

std::vector<double> TreeEnsemble::FeatureImportance() const {
  std::vector<double> importance(features.size(), 0.0);
  for (const Tree& tree : trees) {
    for (const TreeNode& node : tree) {
      if (!node.is_leaf()) importance[node.feature] += node.gain;
    }
  }
  return importance;
}

}  // namespace hdpd::predictor
