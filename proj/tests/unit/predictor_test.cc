#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hdpd/common/error.h"
#include "hdpd/common/matrix.h"
#include "hdpd/predictor/gbdt_trainer.h"
#include "hdpd/predictor/metrics.h"
#include "hdpd/predictor/model_io.h"
#include "hdpd/predictor/model_selection.h"
#include "hdpd/predictor/tree_ensemble.h"

namespace hdpd::predictor {
namespace {

struct Task {
  Matrix x;
  std::vector<int> y;
  std::vector<std::string> participants;
};

// y ~ Bernoulli(logistic(2 x0 - 1.5 x1 + x2)); the other columns are noise.
Task PlantedLogistic(std::size_t n, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  Task t{Matrix(n, p), {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) t.x(i, j) = z(rng);
    const double m = 2.0 * t.x(i, 0) - 1.5 * t.x(i, 1) + 1.0 * t.x(i, 2);
    t.y.push_back(u(rng) < Logistic(m) ? 1 : 0);
    t.participants.push_back("p" + std::to_string(i / 2));
  }
  return t;
}

std::vector<double> Scores(const TreeEnsemble& model, const Matrix& x) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(model.PredictProba(x.Row(i)));
  return out;
}

std::vector<std::string> Names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

TEST(TreeEnsemble, PredictionBasics) {
  TreeEnsemble e;
  e.features = {"a"};
  const std::vector<double> x{0.3};
  EXPECT_DOUBLE_EQ(e.PredictProba(x), 0.5);
  e.trees.push_back({TreeNode{}});
  e.trees[0][0].leaf = std::log(3.0);
  EXPECT_NEAR(e.PredictProba(x), 0.75, 1e-15);
  EXPECT_THROW(e.PredictProba(std::vector<double>{1, 2}), InvalidArgument);
}

TEST(TreeEnsemble, HandWrittenStumpFile) {
  const auto e = ParseEnsemble(R"({"format":"tree-ensemble","version":1,"base_score":0,
    "features":["a","b"],
    "trees":[[{"feature":1,"threshold":2.5,"missing_left":false,"left":1,"right":2},
              {"leaf":-1.0},{"leaf":1.0}]]})");
  EXPECT_NEAR(e.PredictProba(std::vector<double>{0, 2.0}), 1 / (1 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(e.PredictProba(std::vector<double>{0, 2.5}), 1 / (1 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(e.PredictProba(std::vector<double>{0, kMissing}), 1 / (1 + std::exp(-1.0)), 1e-15);
  const auto imp = e.FeatureImportance();
  EXPECT_EQ(imp[0], 0.0);
}

TEST(TreeEnsemble, ValidateRejectsCycles) {
  TreeEnsemble e;
  e.features = {"a"};
  TreeNode root;
  root.feature = 0;
  root.left = 0;
  root.right = 0;
  e.trees.push_back({root});
  EXPECT_THROW(e.Validate(), InvalidArgument);
  e.trees[0][0].left = 5;
  EXPECT_THROW(e.Validate(), InvalidArgument);
}

TEST(TreeEnsemble, MonotoneInLeafValue) {
  const auto t = PlantedLogistic(200, 3, 4);
  TrainConfig config;
  config.rounds = 10;
  auto model = TrainGbdt(t.x, t.y, config);
  const auto row = t.x.Row(0);
  double prev = -1;
  // Find the leaf reached in tree 0 by raising every leaf together.
  for (int step = 0; step < 5; ++step) {
    const double p = model.PredictProba(row);
    EXPECT_GT(p, prev);
    prev = p;
    for (auto& node : model.trees[0]) {
      if (node.is_leaf()) node.leaf += 0.1;
    }
  }
}

TEST(Trainer, SeparableStumpsReachPerfectAuc) {
  Matrix x(100, 1);
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    x(i, 0) = i * 0.37;
    y.push_back(i >= 40);
  }
  TrainConfig config;
  config.rounds = 50;
  config.max_depth = 1;
  const auto model = TrainGbdt(x, y, config);
  EXPECT_DOUBLE_EQ(Auc(Scores(model, x), y), 1.0);
}

TEST(Trainer, XorIsFitExactlyAtDepthTwo) {
  Matrix x(40, 2);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int a = i % 2, b = (i / 2) % 2;
    x(i, 0) = a;
    x(i, 1) = b;
    y.push_back(a ^ b);
  }
  for (const int depth : {2, 3}) {
    TrainConfig config;
    config.rounds = 30;
    config.max_depth = depth;
    config.learning_rate = 0.3;
    const auto model = TrainGbdt(x, y, config);
    for (int i = 0; i < 40; ++i) {
      EXPECT_EQ(model.PredictProba(x.Row(i)) >= 0.5 ? 1 : 0, y[i]);
    }
  }
}

TEST(Trainer, PlantedLogisticHoldOutAuc) {
  const auto train = PlantedLogistic(2000, 6, 10);
  const auto test = PlantedLogistic(2000, 6, 11);
  TrainConfig config;
  config.rounds = 150;
  config.max_depth = 3;
  const auto model = TrainGbdt(train.x, train.y, config, Names(6));
  // Bayes AUC for this margin is about 0.89; the fit must come close.
  EXPECT_GE(Auc(Scores(model, test.x), test.y), 0.85);
  EXPECT_GE(Auc(Scores(model, train.x), train.y), 0.95);
  const auto imp = model.FeatureImportance();
  std::vector<std::size_t> order{0, 1, 2, 3, 4, 5};
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return imp[a] > imp[b]; });
  std::vector<std::size_t> top(order.begin(), order.begin() + 3);
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Trainer, LossTraceIsNonIncreasing) {
  const auto t = PlantedLogistic(500, 4, 3);
  TrainConfig config;
  config.rounds = 60;
  std::vector<double> trace;
  TrainGbdt(t.x, t.y, config, {}, &trace);
  ASSERT_EQ(trace.size(), 61u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-12);
}

TEST(Trainer, DeterministicPerSeedAndRejectsBadInput) {
  const auto t = PlantedLogistic(300, 3, 8);
  TrainConfig config;
  config.rounds = 20;
  config.subsample = 0.7;
  config.seed = 5;
  EXPECT_EQ(EnsembleToJson(TrainGbdt(t.x, t.y, config)), EnsembleToJson(TrainGbdt(t.x, t.y, config)));
  std::vector<int> ones(t.y.size(), 1);
  EXPECT_THROW(TrainGbdt(t.x, ones, config), ComputationError);
  EXPECT_THROW(TrainGbdt(t.x, std::vector<int>{0, 1}, config), InvalidArgument);
  config.learning_rate = 0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
}

TEST(Trainer, ImportanceAccounting) {
  const auto t = PlantedLogistic(300, 4, 12);
  TrainConfig config;
  config.rounds = 15;
  const auto model = TrainGbdt(t.x, t.y, config, Names(4));
  double total = 0;
  for (const auto& tree : model.trees) {
    for (const auto& n : tree) {
      if (!n.is_leaf()) total += n.gain;
    }
  }
  const auto imp = model.FeatureImportance();
  double sum = 0;
  for (const double v : imp) {
    EXPECT_GE(v, 0.0);
    sum += v;
  }
  EXPECT_NEAR(sum, total, 1e-9 * std::max(1.0, total));
}

TEST(ModelIo, RoundTripIsBitIdentical) {
  const auto t = PlantedLogistic(800, 5, 21);
  TrainConfig config;
  config.rounds = 80;
  FittedModel fm;
  fm.ensemble = TrainGbdt(t.x, t.y, config, Names(5));
  fm.threshold = 0.3141592653589793;
  fm.importances = {{"f0", 1.0 / 7.0}};
  const auto back = ParseFittedModel(FittedModelToJson(fm).dump());
  EXPECT_EQ(back.threshold, fm.threshold);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0, 2);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = u(rng) < 0.05 ? kMissing : z(rng);
    const double a = fm.Predict(x), b = back.Predict(x);
    ASSERT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(ModelIo, TruncatedAndVersionErrors) {
  TreeEnsemble e;
  e.features = {"a"};
  e.trees.push_back({TreeNode{}});
  const std::string text = EnsembleToJson(e).dump();
  for (std::size_t cut : {text.size() / 2, text.size() - 1}) {
    EXPECT_THROW(ParseEnsemble(text.substr(0, cut)), ParseError);
  }
  auto j = EnsembleToJson(e);
  j["version"] = 99;
  EXPECT_THROW(EnsembleFromJson(j), VersionMismatch);
  j = EnsembleToJson(e);
  j["trees"][0][0] = {{"feature", 3}, {"threshold", 0}, {"left", 1}, {"right", 2}};
  EXPECT_THROW(EnsembleFromJson(j), Error);
}

double PairwiseAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      den += 1;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / den;
}

TEST(Metrics, AucMatchesPairwiseOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> level(0, 9), bit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
      s.push_back(level(rng) / 10.0);
      y.push_back(bit(rng));
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(Auc(s, y), PairwiseAuc(s, y), 1e-12);
    std::vector<double> t;
    for (const double v : s) t.push_back(std::exp(3 * v) - 7);
    EXPECT_NEAR(Auc(t, y), Auc(s, y), 1e-12);
  }
  EXPECT_DOUBLE_EQ(Auc(std::vector<double>{1, 2, 3, 4}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(Auc(std::vector<double>{4, 3, 2, 1}, std::vector<int>{0, 0, 1, 1}), 0.0);
  EXPECT_THROW(Auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), ComputationError);
}

TEST(Metrics, ConfusionCounts) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  const auto all = Confusion(s, y, 0.0);
  EXPECT_EQ(all.fn + all.tn, 0);
  const auto none = Confusion(s, y, std::nextafter(0.8, 1.0));
  EXPECT_EQ(none.tp + none.fp, 0);
  const auto mid = Confusion(s, y, 0.35);
  EXPECT_EQ(mid.tp, 2);
  EXPECT_EQ(mid.fp, 1);
  EXPECT_EQ(mid.tp + mid.fp + mid.fn + mid.tn, 4);
  EXPECT_NEAR(F1(mid), 0.8, 1e-12);
}

TEST(Metrics, BestF1Threshold) {
  const std::vector<double> s{0, 0, 1, 1};
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_EQ(BestF1Threshold(s, y), 1.0);
  EXPECT_THROW(BestF1Threshold(s, std::vector<int>{0, 0, 0, 0}), ComputationError);
  EXPECT_NEAR(LogLoss(std::vector<double>{0.5}, std::vector<int>{1}), std::log(2.0), 1e-12);
}

TEST(ModelSelection, MedianOfFoldThresholds) {
  std::vector<FoldResult> folds;
  for (const double tau : {0.5, 0.1, 0.4, 0.2, 0.3}) {
    FoldResult f;
    f.trained = true;
    // One positive scoring tau and one negative below it: best F1 at tau.
    f.scores = {tau / 2, tau};
    f.labels = {0, 1};
    folds.push_back(f);
  }
  const auto sel = ThresholdFromFolds(folds);
  EXPECT_DOUBLE_EQ(sel.threshold, 0.3);
  EXPECT_EQ(sel.fold_thresholds.size(), 5u);

  folds[0].labels = {0, 0};
  const auto skipped = ThresholdFromFolds(folds);
  EXPECT_EQ(skipped.skipped_folds, std::vector<int>{0});
  const auto [lo, hi] = std::minmax_element(skipped.fold_thresholds.begin(),
                                            skipped.fold_thresholds.end());
  EXPECT_GE(skipped.threshold, *lo);
  EXPECT_LE(skipped.threshold, *hi);
  for (auto& f : folds) f.labels = {0, 0};
  EXPECT_THROW(ThresholdFromFolds(folds), ComputationError);
}

TEST(ModelSelection, PerfectScoresGiveThresholdOne) {
  Matrix x(60, 1);
  std::vector<int> y;
  std::vector<std::string> participants;
  for (int i = 0; i < 60; ++i) {
    y.push_back(i % 3 == 0);
    x(i, 0) = y.back();
    participants.push_back("p" + std::to_string(i));
  }
  std::vector<FoldResult> folds;
  for (int f = 0; f < 5; ++f) {
    FoldResult r;
    r.trained = true;
    for (int i = f; i < 60; i += 5) {
      r.scores.push_back(y[i]);
      r.labels.push_back(y[i]);
    }
    folds.push_back(r);
  }
  EXPECT_DOUBLE_EQ(ThresholdFromFolds(folds).threshold, 1.0);
}

TEST(ModelSelection, FoldsKeepParticipantsTogether) {
  std::vector<std::string> participants;
  for (int i = 0; i < 100; ++i) participants.push_back("p" + std::to_string(i % 23));
  const auto folds = ParticipantFolds(participants, 5, 9);
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    auto [it, inserted] = seen.emplace(participants[i], folds[i]);
    EXPECT_EQ(it->second, folds[i]);
  }
  EXPECT_THROW(ParticipantFolds(std::vector<std::string>{"a", "b"}, 5, 0), InvalidArgument);
}

TEST(ModelSelection, RandomLabelsGiveChanceCvAuc) {
  auto t = PlantedLogistic(600, 4, 30);
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.5);
  for (auto& v : t.y) v = coin(rng);
  TrainConfig config;
  config.rounds = 40;
  config.max_depth = 2;
  const auto folds = CrossValidate(t.x, t.y, t.participants, config, 5, 2);
  EXPECT_NEAR(MeanFoldAuc(folds), 0.5, 0.1);
}

TEST(ModelSelection, RfeKeepsCausalFeaturesAndTraceLength) {
  const auto t = PlantedLogistic(600, 10, 40);
  TrainConfig config;
  config.rounds = 30;
  config.max_depth = 2;
  const auto names = Names(10);
  const auto r = Rfe(t.x, t.y, t.participants, names, config, 5, 3, 1);
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(r.trace.size(), 10u - 5u + 1u);
  EXPECT_EQ(r.selected.size(), 5u);
  for (const std::size_t causal : {0u, 1u, 2u}) {
    EXPECT_TRUE(std::count(r.selected.begin(), r.selected.end(), causal)) << causal;
  }
  // Removed features never come back.
  std::set<std::string> removed;
  for (const auto& step : r.trace) {
    for (const auto& name : step.removed) EXPECT_TRUE(removed.insert(name).second);
  }
  for (const auto c : r.selected) EXPECT_FALSE(removed.count(names[c]));

  const auto identity = Rfe(t.x, t.y, t.participants, names, config, 10, 3, 1);
  EXPECT_EQ(identity.selected.size(), 10u);
  EXPECT_EQ(identity.trace.size(), 1u);
}

TEST(ModelSelection, GridSearchPrefersInformativeConfig) {
  const auto t = PlantedLogistic(400, 3, 50);
  TrainConfig weak, strong;
  weak.rounds = 1;
  weak.max_depth = 1;
  weak.learning_rate = 0.01;
  strong.rounds = 60;
  strong.max_depth = 2;
  const std::vector<TrainConfig> grid{weak, strong};
  EXPECT_EQ(GridSearch(t.x, t.y, t.participants, grid, 3, 0), 1u);
}

}  // namespace
}  // namespace hdpd::predictor
