#include "hdpd/predictor/gbdt_trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hdpd/common/error.h"
#include "hdpd/predictor/metrics.h"

namespace hdpd::predictor {
namespace {

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
  NodeStats left;
  NodeStats right;
};

double Score(const NodeStats& s, double lambda) { return s.g * s.g / (s.h + lambda); }

// Column-wise presorted view of the training matrix.
struct SortedColumns {
  std::vector<std::vector<std::uint32_t>> present;  // row ids, ascending value
  std::vector<std::vector<std::uint32_t>> missing;  // row ids with NaN
};

SortedColumns Presort(const Matrix& x) {
  SortedColumns cols;
  cols.present.resize(x.cols());
  cols.missing.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& present = cols.present[f];
    for (std::uint32_t i = 0; i < x.rows(); ++i) {
      if (IsMissing(x(i, f))) {
        cols.missing[f].push_back(i);
      } else {
        present.push_back(i);
      }
    }
    std::stable_sort(present.begin(), present.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x(a, f) < x(b, f);
    });
  }
  return cols;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const SortedColumns& cols, const TrainConfig& config)
      : x_(x), cols_(cols), config_(config) {}

  // `position[i]` is -1 for rows not used this round.
  Tree Build(std::span<const double> grad, std::span<const double> hess,
             std::vector<int>& position) {
    Tree tree(1);
    std::vector<NodeStats> stats(1);
    for (std::size_t i = 0; i < position.size(); ++i) {
      if (position[i] < 0) continue;
      stats[0].g += grad[i];
      stats[0].h += hess[i];
    }
    std::vector<int> frontier = {0};
    for (int depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
      const auto best = FindSplits(grad, hess, position, tree.size(), stats, frontier);
      std::vector<int> next;
      std::vector<int> left_of(tree.size(), -1);
      for (const int node : frontier) {
        const SplitCandidate& c = best[node];
        if (c.feature < 0) continue;
        const int left = static_cast<int>(tree.size());
        tree.resize(tree.size() + 2);
        stats.resize(tree.size());
        TreeNode& n = tree[node];
        n.feature = c.feature;
        n.threshold = c.threshold;
        n.missing_left = c.missing_left;
        n.left = left;
        n.right = left + 1;
        n.gain = c.gain;
        stats[left] = c.left;
        stats[left + 1] = c.right;
        left_of[node] = left;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t i = 0; i < position.size(); ++i) {
        const int node = position[i];
        if (node < 0 || node >= static_cast<int>(left_of.size()) || left_of[node] < 0) continue;
        const TreeNode& n = tree[node];
        const double v = x_(i, n.feature);
        const bool go_left = IsMissing(v) ? n.missing_left : v < n.threshold;
        position[i] = go_left ? n.left : n.right;
      }
      frontier = std::move(next);
    }
    for (std::size_t id = 0; id < tree.size(); ++id) {
      if (tree[id].is_leaf()) {
        tree[id].leaf =
            -config_.learning_rate * stats[id].g / (stats[id].h + config_.l2_lambda);
      }
    }
    return tree;
  }

 private:
  std::vector<SplitCandidate> FindSplits(std::span<const double> grad,
                                         std::span<const double> hess,
                                         const std::vector<int>& position,
                                         std::size_t n_nodes,
                                         const std::vector<NodeStats>& stats,
                                         const std::vector<int>& frontier) {
    const double lambda = config_.l2_lambda;
    std::vector<SplitCandidate> best(n_nodes);
    std::vector<bool> active(n_nodes, false);
    for (const int node : frontier) active[node] = true;

    std::vector<NodeStats> missing(n_nodes), acc(n_nodes);
    std::vector<double> last_value(n_nodes);
    std::vector<bool> seen(n_nodes);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::fill(missing.begin(), missing.end(), NodeStats{});
      std::fill(acc.begin(), acc.end(), NodeStats{});
      std::fill(seen.begin(), seen.end(), false);
      for (const std::uint32_t i : cols_.missing[f]) {
        const int node = position[i];
        if (node < 0 || !active[node]) continue;
        missing[node].g += grad[i];
        missing[node].h += hess[i];
      }
      for (const std::uint32_t i : cols_.present[f]) {
        const int node = position[i];
        if (node < 0 || !active[node]) continue;
        const double v = x_(i, f);
        if (seen[node] && v > last_value[node]) {
          Evaluate(static_cast<int>(f), last_value[node], v, stats[node], missing[node],
                   acc[node], lambda, best[node]);
        }
        acc[node].g += grad[i];
        acc[node].h += hess[i];
        last_value[node] = v;
        seen[node] = true;
      }
    }
    return best;
  }

  void Evaluate(int feature, double below, double above, const NodeStats& total,
                const NodeStats& miss, const NodeStats& left_present, double lambda,
                SplitCandidate& best) const {
    const double parent = Score(total, lambda);
    for (const bool missing_left : {true, false}) {
      NodeStats left = left_present;
      if (missing_left) {
        left.g += miss.g;
        left.h += miss.h;
      }
      const NodeStats right{total.g - left.g, total.h - left.h};
      if (left.h < config_.min_child_weight || right.h < config_.min_child_weight) continue;
      const double gain =
          0.5 * (Score(left, lambda) + Score(right, lambda) - parent);
      // Zero-gain splits are kept so that pure interactions (XOR) can open.
      if (gain < config_.min_split_gain) continue;
      if (best.feature < 0 || gain > best.gain + 1e-12) {
        double threshold = below + (above - below) / 2.0;
        if (!(below < threshold)) threshold = above;
        best = {gain, feature, threshold, missing_left, left, right};
      }
    }
  }

  const Matrix& x_;
  const SortedColumns& cols_;
  const TrainConfig& config_;
};

}  // namespace

void TrainConfig::Validate() const {
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw InvalidArgument("learning_rate must lie in (0, 1]");
  }
  if (l2_lambda < 0.0) throw InvalidArgument("l2_lambda must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) {
    throw InvalidArgument("subsample must lie in (0, 1]");
  }
}

TreeEnsemble TrainGbdt(const Matrix& x, std::span<const int> y,
                       const TrainConfig& config,
                       std::vector<std::string> feature_names,
                       std::vector<double>* loss_trace) {
  config.Validate();
  if (x.rows() != y.size()) throw InvalidArgument("X and y differ in length");
  if (x.rows() < 2) throw InvalidArgument("training needs at least 2 rows");
  const auto positives = std::count(y.begin(), y.end(), 1);
  for (const int label : y) {
    if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
  }
  if (positives == 0 || positives == static_cast<long>(y.size())) {
    throw ComputationError("training labels contain a single class");
  }
  if (feature_names.empty()) {
    for (std::size_t f = 0; f < x.cols(); ++f) feature_names.push_back("f" + std::to_string(f));
  }
  if (feature_names.size() != x.cols()) {
    throw InvalidArgument("feature name count does not match X width");
  }

  TreeEnsemble model;
  model.features = std::move(feature_names);
  const double prevalence = static_cast<double>(positives) / static_cast<double>(y.size());
  model.base_score = std::log(prevalence / (1.0 - prevalence));

  const std::size_t n = x.rows();
  const SortedColumns cols = Presort(x);
  TreeBuilder builder(x, cols, config);
  std::vector<double> margin(n, model.base_score), grad(n), hess(n);
  std::vector<int> position(n);
  std::mt19937_64 rng(config.seed);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  auto probs_of = [&] {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = Logistic(margin[i]);
    return p;
  };
  if (loss_trace) {
    loss_trace->clear();
    loss_trace->push_back(LogLoss(probs_of(), y));
  }

  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Logistic(margin[i]);
      grad[i] = p - y[i];
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    if (config.subsample < 1.0) {
      std::fill(position.begin(), position.end(), -1);
      std::shuffle(order.begin(), order.end(), rng);
      const auto take = std::max<std::size_t>(
          1, static_cast<std::size_t>(config.subsample * static_cast<double>(n)));
      for (std::size_t k = 0; k < take; ++k) position[order[k]] = 0;
    } else {
      std::fill(position.begin(), position.end(), 0);
    }
    Tree tree = builder.Build(grad, hess, position);
    for (std::size_t i = 0; i < n; ++i) {
      int id = 0;
      while (!tree[id].is_leaf()) {
        const TreeNode& node = tree[id];
        const double v = x(i, node.feature);
        id = (IsMissing(v) ? node.missing_left : v < node.threshold) ? node.left : node.right;
      }
      margin[i] += tree[id].leaf;
    }
    model.trees.push_back(std::move(tree));
    if (loss_trace) loss_trace->push_back(LogLoss(probs_of(), y));
  }
  return model;
}

}  // namespace hdpd::predictor
