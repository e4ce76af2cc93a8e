#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hdpd/common/error.h"
#include "hdpd/diagram/active_search.h"
#include "hdpd/diagram/analytics.h"
#include "hdpd/diagram/boundary.h"
#include "hdpd/diagram/builder.h"
#include "hdpd/diagram/diagram_io.h"
#include "hdpd/diagram/label_spreading.h"
#include "hdpd/diagram/ward.h"
#include "oracles.h"

namespace hdpd::diagram {
namespace {

TEST(Boundary, AllThreeByThreeGridsMatchDefinition) {
  for (int mask = 0; mask < 512; ++mask) {
    std::vector<int> g(9);
    for (int b = 0; b < 9; ++b) g[b] = (mask >> b) & 1;
    ASSERT_EQ(ClassifyBoundary(g, 3, 3), oracle::BruteForceBoundary(g, 3, 3)) << "mask " << mask;
  }
}

TEST(Boundary, Examples) {
  EXPECT_EQ(ClassifyBoundary(std::vector<int>(9, 1), 3, 3), BoundaryPattern::kNoBoundaryAllOnset);
  EXPECT_EQ(ClassifyBoundary(std::vector<int>{0, 0, 1, 0, 0, 1, 0, 0, 1}, 3, 3),
            BoundaryPattern::kUnivariateX);
  std::vector<int> diag(9);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) diag[y * 3 + x] = x + y >= 2;
  }
  EXPECT_EQ(ClassifyBoundary(diag, 3, 3), BoundaryPattern::kBivariate);
  // A singleton axis can never carry a univariate boundary along itself.
  EXPECT_EQ(ClassifyBoundary(std::vector<int>{0, 1, 1}, 3, 1), BoundaryPattern::kUnivariateX);
  EXPECT_THROW(ClassifyBoundary(std::vector<int>{0, 1}, 3, 1), InvalidArgument);
}

TEST(Boundary, TranspositionSymmetry) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> mode(0, 3), bit(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> g(49);
    // Mix of structured and random grids so every class appears.
    const int m = mode(rng);
    const int cut = bit(rng) + 2;
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 7; ++x) {
        g[y * 7 + x] = m == 0 ? x >= cut : m == 1 ? y >= cut : m == 2 ? x + y >= 6 : bit(rng);
      }
    }
    const auto p = ClassifyBoundary(g, 7, 7);
    ASSERT_EQ(ClassifyBoundary(oracle::TransposeGrid(g, 7, 7), 7, 7), Transposed(p));
  }
  EXPECT_EQ(Transposed(BoundaryPattern::kBivariate), BoundaryPattern::kBivariate);
  EXPECT_EQ(ParseBoundaryPattern(ToString(BoundaryPattern::kUnivariateY)),
            BoundaryPattern::kUnivariateY);
}

TEST(LabelSpreading, MatchesDirectSolve) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  const double alpha = 0.2;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 25, classes = 2 + trial % 2;
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng) < 0.3 ? 0.0 : u(rng);
    }
    const Matrix s = SymmetricNormalize(w);
    std::vector<int> labels(n, -1);
    for (int i = 0; i < n; ++i) {
      if (u(rng) < 0.3) labels[i] = static_cast<int>(u(rng) * classes);
    }
    labels[trial % n] = 0;
    SpreadingOptions options;
    options.alpha = alpha;
    const auto result = LabelSpreading(s, labels, classes, options);
    ASSERT_TRUE(result.converged);

    Eigen::MatrixXd es(n, n), y = Eigen::MatrixXd::Zero(n, classes);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) es(i, j) = s(i, j);
      if (labels[i] >= 0) y(i, labels[i]) = 1.0;
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - alpha * es;
    const Eigen::MatrixXd f = (1 - alpha) * a.fullPivLu().solve(y);
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      double row = 0;
      for (int c = 0; c < classes; ++c) {
        worst = std::max(worst, std::abs(result.scores(i, c) - f(i, c)));
        ASSERT_GE(result.posterior(i, c), 0.0);
        row += result.posterior(i, c);
      }
      ASSERT_NEAR(row, 1.0, 1e-12);
    }
    ASSERT_LE(worst, 1e-8) << "trial " << trial;
  }
}

TEST(LabelSpreading, ZeroAlphaAndSingleLabel) {
  const Matrix s = SymmetricNormalize(GridAffinity(4, 4, 20.0));
  std::vector<int> labels(16, -1);
  labels[5] = 1;
  labels[0] = 0;
  SpreadingOptions options;
  options.alpha = 0.0;
  const auto fixed = LabelSpreading(s, labels, 2, options);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(fixed.scores(i, 0), labels[i] == 0 ? 1.0 : 0.0);
    EXPECT_EQ(fixed.scores(i, 1), labels[i] == 1 ? 1.0 : 0.0);
  }
  std::vector<int> one(16, -1);
  one[7] = 1;
  const auto spread = LabelSpreading(s, one, 2, {});
  for (int i = 0; i < 16; ++i) EXPECT_GT(spread.posterior(i, 1), spread.posterior(i, 0));
  EXPECT_THROW(LabelSpreading(s, std::vector<int>(16, -1), 2, {}), InvalidArgument);
}

TEST(ActiveSearch, InitialCellsAreDeterministic) {
  const auto cells = InitialCells(21, 21, 3 * 21 + 4, 10, 0);
  ASSERT_EQ(cells.size(), 10u);
  const std::vector<std::size_t> fixed{0, 20, 420, 440, 10, 430, 210, 230, 220, 67};
  EXPECT_EQ(std::set<std::size_t>(cells.begin(), cells.end()),
            std::set<std::size_t>(fixed.begin(), fixed.end()));
  EXPECT_EQ(InitialCells(21, 21, 220, 10, 5), InitialCells(21, 21, 220, 10, 5));
  EXPECT_EQ(std::set<std::size_t>(cells.begin(), cells.end()).size(), 10u);
  EXPECT_EQ(InitialCells(2, 2, 0, 10, 0).size(), 4u);
}

TEST(ActiveSearch, FullBudgetReproducesGrid) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto truth = oracle::SmoothField(rng, 21, 21);
    ActiveLearningConfig config;
    config.budget = 441;
    std::size_t calls = 0;
    const auto r = ActiveSearch(21, 21, 220, [&](std::size_t c) { ++calls; return truth[c]; }, config);
    EXPECT_EQ(r.labels, truth);
    EXPECT_EQ(r.queries, 441u);
    EXPECT_EQ(calls, 441u);
  }
}

TEST(ActiveSearch, BudgetFiftyAgreesOnSmoothFields) {
  std::mt19937_64 rng(2024);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = oracle::SmoothField(rng, 21, 21);
    ActiveLearningConfig config;
    config.seed = trial;
    const auto r = ActiveSearch(21, 21, 220, [&](std::size_t c) { return truth[c]; }, config);
    ASSERT_EQ(r.queries, 50u);
    std::size_t agree = 0;
    for (std::size_t c = 0; c < truth.size(); ++c) agree += r.labels[c] == truth[c];
    good += agree >= 0.95 * truth.size();
  }
  EXPECT_GE(good, 90);
}

TEST(ActiveSearch, InitialOnlyBudget) {
  ActiveLearningConfig config;
  config.budget = 10;
  const auto r = ActiveSearch(21, 21, 0, [](std::size_t c) { return int(c % 21 > 10); }, config);
  EXPECT_EQ(std::count(r.queried.begin(), r.queried.end(), true), 10);
  config.initial_points = 20;
  EXPECT_THROW(config.Validate(), InvalidArgument);
}

// Three continuous model features on [0, 100]; reference rows are random.
struct Fixture {
  predictor::FittedModel model;
  pmice::ReferenceData reference;
  pmice::FeatureSpace space;
  DiagramContext context;
  RecordView record;

  explicit Fixture(double stump_at, int feature = 0) {
    model.ensemble.features = {"a", "b", "c"};
    predictor::TreeNode root;
    root.feature = feature;
    root.threshold = stump_at;
    root.left = 1;
    root.right = 2;
    predictor::TreeNode lo, hi;
    lo.leaf = -2;
    hi.leaf = 2;
    model.ensemble.trees.push_back({root, lo, hi});
    model.threshold = 0.5;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 100);
    reference.values = Matrix(60, 3);
    for (std::size_t i = 0; i < 60; ++i) {
      for (std::size_t c = 0; c < 3; ++c) reference.values(i, c) = u(rng);
      reference.labels.push_back(static_cast<int>(i % 2));
      reference.participants.push_back("r" + std::to_string(i));
      reference.years.push_back(2005);
    }
    space.discrete = {false, false, false};
    space.domains = {{0, 100}, {0, 100}, {0, 100}};
    context.model = &model;
    context.reference = &reference;
    context.space = &space;
    context.disease = "toy";
    record.id = "p:2006";
    record.participant = "p";
    record.year = 2006;
    record.values = {50, 50, 50};
    record.missing = {false, false, false};
  }
};

TEST(Builder, StumpGivesUnivariateStep) {
  for (const auto mode : {DiagramMode::kIce2d, DiagramMode::kPmice}) {
    Fixture f(47.0);
    const auto d = BuildDiagramFull(f.context, f.record, 0, 1, mode);
    EXPECT_EQ(d.cells(), 441u);
    EXPECT_EQ(d.pattern, BoundaryPattern::kUnivariateX);
    for (std::size_t iy = 0; iy < d.ny(); ++iy) {
      for (std::size_t ix = 0; ix < d.nx(); ++ix) {
        ASSERT_EQ(d.LabelAt(ix, iy), d.axis_x[ix] >= 47.0 ? 1 : 0);
      }
    }
    d.Validate();
    const auto swapped = BuildDiagramFull(f.context, f.record, 1, 0, mode);
    EXPECT_EQ(swapped.pattern, BoundaryPattern::kUnivariateY);
  }
}

TEST(Builder, ConstantModelHasNoBoundary) {
  Fixture f(1000.0);
  const auto d = BuildDiagramFull(f.context, f.record, 0, 2, DiagramMode::kPmice);
  EXPECT_EQ(d.pattern, BoundaryPattern::kNoBoundaryAllNonOnset);
}

TEST(Builder, ActiveWithFullBudgetMatchesFull) {
  Fixture f(47.0);
  const auto full = BuildDiagramFull(f.context, f.record, 0, 1, DiagramMode::kPmice);
  ActiveLearningConfig config;
  config.budget = 10000;
  const auto active = BuildDiagramActive(f.context, f.record, 0, 1, DiagramMode::kPmice, config);
  EXPECT_EQ(active.label, full.label);
  EXPECT_EQ(active.pattern, full.pattern);
  config.budget = 10;
  const auto sparse = BuildDiagramActive(f.context, f.record, 0, 1, DiagramMode::kPmice, config);
  EXPECT_EQ(std::count(sparse.queried.begin(), sparse.queried.end(), true), 10);
  sparse.Validate();
}

TEST(Builder, PairsSkipMissingFeatures) {
  Fixture f(47.0);
  EXPECT_EQ(MeasuredPairs(f.record).size(), 3u);
  f.record.missing[1] = true;
  const auto pairs = MeasuredPairs(f.record);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_EQ(BatchDiagrams(f.context, f.record, DiagramMode::kIce2d).size(), 1u);
  EXPECT_THROW(CheckPair(f.context, f.record, 0, 1), InvalidArgument);
  EXPECT_THROW(CheckPair(f.context, f.record, 0, 0), InvalidArgument);
  RecordView wide;
  wide.values.assign(25, 1.0);
  wide.missing.assign(25, false);
  EXPECT_EQ(MeasuredPairs(wide).size(), 300u);
}

Diagram FromLabels(std::vector<int> labels, std::size_t nx, std::size_t ny, std::size_t fx,
                   std::size_t fy, const std::string& disease = "d") {
  Diagram d;
  d.record_id = "r:2005";
  d.disease = disease;
  d.var_x = "v" + std::to_string(fx);
  d.var_y = "v" + std::to_string(fy);
  d.fx = fx;
  d.fy = fy;
  for (std::size_t i = 0; i < nx; ++i) d.axis_x.push_back(60.0 + 10.0 * i);
  for (std::size_t i = 0; i < ny; ++i) d.axis_y.push_back(double(i));
  d.threshold = 0.5;
  for (const int l : labels) d.prob.push_back(l ? 0.8 : 0.2);
  d.label = std::move(labels);
  d.pattern = ClassifyBoundary(d.label, nx, ny);
  return d;
}

TEST(Analytics, ContributionRatios) {
  std::vector<Diagram> ds;
  // Feature 0: univariate along itself in 1 of 4 diagrams; feature 3 only bivariate.
  ds.push_back(FromLabels({0, 1, 0, 1}, 2, 2, 0, 1));  // Univariate-X, credits 0
  ds.push_back(FromLabels({0, 0, 1, 1}, 2, 2, 0, 2));  // Univariate-Y, credits 2
  ds.push_back(FromLabels({0, 0, 0, 0}, 2, 2, 0, 4));
  ds.push_back(FromLabels({1, 1, 1, 1}, 2, 2, 0, 5));
  ds.push_back(FromLabels({0, 0, 0, 1}, 2, 2, 3, 1));  // Bivariate, credits 3 and 1
  const auto c = FeatureContribution(ds, 7);
  EXPECT_DOUBLE_EQ(c[0], 0.25);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_DOUBLE_EQ(c[2], 1.0);
  EXPECT_DOUBLE_EQ(c[3], 1.0);
  EXPECT_DOUBLE_EQ(c[4], 0.0);
  EXPECT_DOUBLE_EQ(c[6], 0.0);
  for (const double v : c) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Analytics, BivariateProportion) {
  std::vector<Diagram> ds;
  for (int i = 0; i < 2; ++i) ds.push_back(FromLabels({0, 0, 0, 1}, 2, 2, 0, 1));
  ds.push_back(FromLabels({0, 1, 0, 1}, 2, 2, 0, 1));
  for (int i = 0; i < 5; ++i) ds.push_back(FromLabels({0, 0, 0, 0}, 2, 2, 0, 1));
  EXPECT_NEAR(*BivariateProportion(ds), 2.0 / 3.0, 1e-15);
  EXPECT_FALSE(BivariateProportion(std::span(ds).subspan(3)).has_value());
  EXPECT_EQ(*BivariateProportion(std::span(ds).subspan(2, 1)), 0.0);
}

TEST(Analytics, LimitValues) {
  // x = eGFR {60, 70, 80}; row 0 onset at <= 70, row 1 no onset.
  const auto d = FromLabels({1, 1, 0, 0, 0, 0}, 3, 2, 0, 1);
  const auto low = ExtractLimits(d, PrimaryAxis::kX, cohort::RiskDirection::kLowIsRisk);
  EXPECT_EQ(low.limits, (std::vector<double>{70, 60}));
  EXPECT_EQ(low.min, 60);
  EXPECT_EQ(low.max, 70);
  const auto full = FromLabels({1, 1, 1, 1, 1, 1}, 3, 2, 0, 1);
  EXPECT_EQ(ExtractLimits(full, PrimaryAxis::kX, cohort::RiskDirection::kLowIsRisk).limits,
            (std::vector<double>{80, 80}));
  // Mirror: negate the axis and flip the direction.
  auto mirrored = FromLabels({0, 1, 1, 0, 0, 0}, 3, 2, 0, 1);
  mirrored.axis_x = {-80, -70, -60};
  const auto high = ExtractLimits(mirrored, PrimaryAxis::kX, cohort::RiskDirection::kHighIsRisk);
  EXPECT_EQ(high.limits, (std::vector<double>{-70, -60}));
  EXPECT_THROW(ExtractLimits(d, PrimaryAxis::kX, std::nullopt), InvalidArgument);
  const auto by_y = ExtractLimits(d, PrimaryAxis::kY, cohort::RiskDirection::kHighIsRisk);
  EXPECT_EQ(by_y.limits.size(), 3u);
}

TEST(Analytics, SuperimposeSemantics) {
  const auto a = FromLabels({1, 1, 0, 0}, 2, 2, 0, 1, "a");
  const auto b = FromLabels({0, 0, 1, 1}, 2, 2, 0, 1, "b");
  const auto c = FromLabels({0, 1, 1, 0}, 2, 2, 0, 1, "c");
  const std::vector<Diagram> one{a};
  const auto single = Superimpose(one);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(single.cells[i].size(), std::size_t(a.label[i]));
  const std::vector<Diagram> ab{a, b};
  const auto disjoint = Superimpose(ab);
  for (const auto& cell : disjoint.cells) EXPECT_EQ(cell.size(), 1u);
  EXPECT_EQ(disjoint.FreeCells(), 0u);
  const std::vector<Diagram> abc{a, b, c};
  const auto three = Superimpose(abc);
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& name : disjoint.cells[i]) {
      EXPECT_TRUE(std::count(three.cells[i].begin(), three.cells[i].end(), name));
    }
  }
  auto shifted = b;
  shifted.axis_x[1] += 1;
  const std::vector<Diagram> bad{a, shifted};
  EXPECT_THROW(Superimpose(bad), InvalidArgument);
  EXPECT_THROW(Superimpose(std::vector<Diagram>{}), InvalidArgument);
}

// Ward by brute force: recompute every cluster pair from centroids each step.
std::vector<double> NaiveWardHeights(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  std::vector<double> heights;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        std::vector<double> ci(p, 0), cj(p, 0);
        for (const auto r : clusters[i]) for (std::size_t c = 0; c < p; ++c) ci[c] += x(r, c) / clusters[i].size();
        for (const auto r : clusters[j]) for (std::size_t c = 0; c < p; ++c) cj[c] += x(r, c) / clusters[j].size();
        double sq = 0;
        for (std::size_t c = 0; c < p; ++c) sq += (ci[c] - cj[c]) * (ci[c] - cj[c]);
        const double ni = clusters[i].size(), nj = clusters[j].size();
        const double d = std::sqrt(2 * ni * nj / (ni + nj) * sq);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    heights.push_back(best);
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + bj);
  }
  return heights;
}

TEST(Ward, MatchesNaiveOracle) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(10, 4);
    for (std::size_t i = 0; i < 10; ++i) for (std::size_t c = 0; c < 4; ++c) x(i, c) = u(rng);
    const auto tree = WardCluster(x);
    const auto want = NaiveWardHeights(x);
    ASSERT_EQ(tree.merges.size(), 9u);
    for (std::size_t i = 0; i < 9; ++i) {
      ASSERT_NEAR(tree.merges[i].height, want[i], 1e-9) << "trial " << trial;
      if (i == 0) continue;
      ASSERT_GE(tree.merges[i].height, tree.merges[i - 1].height - 1e-12);
    }
    auto order = tree.order;
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < 10; ++i) ASSERT_EQ(order[i], i);
  }
}

TEST(Ward, GeometryAndDuplicates) {
  Matrix x(4, 1);
  x(0, 0) = 0;
  x(1, 0) = 100;
  x(2, 0) = 1;
  x(3, 0) = 101;
  const auto tree = WardCluster(x);
  EXPECT_EQ(tree.merges[0].a, 0u);
  EXPECT_EQ(tree.merges[0].b, 2u);
  EXPECT_EQ(tree.merges[1].a, 1u);
  EXPECT_EQ(tree.merges[1].b, 3u);
  Matrix dup(3, 2, 1.0);
  dup(2, 0) = 5;
  EXPECT_EQ(WardCluster(dup).merges[0].height, 0.0);
  EXPECT_THROW(WardCluster(Matrix(1, 2)), InvalidArgument);
}

TEST(DiagramIo, RoundTripAndErrors) {
  Fixture f(47.0);
  ActiveLearningConfig config;
  config.budget = 30;
  const auto d = BuildDiagramActive(f.context, f.record, 0, 1, DiagramMode::kPmice, config);
  const auto j = DiagramToJson(d);
  const auto back = DiagramFromJson(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(DiagramToJson(back), j);
  EXPECT_EQ(back.queried, d.queried);
  EXPECT_EQ(back.label, d.label);
  auto bad = j;
  bad["version"] = 7;
  EXPECT_THROW(DiagramFromJson(bad), VersionMismatch);
  bad = j;
  bad.erase("label");
  EXPECT_THROW(DiagramFromJson(bad), ParseError);
  bad = j;
  bad["pattern"] = "no-boundary-all-onset";
  EXPECT_THROW(DiagramFromJson(bad), Error);
}

TEST(DiagramIo, ContributionExports) {
  ContributionMatrix m;
  m.records = {"a:1", "b:1", "c:1"};
  m.features = {"x", "y"};
  m.values = Matrix(3, 2);
  m.values(0, 0) = 1;
  m.values(2, 0) = 0.9;
  const auto tree = WardCluster(m.values);
  const auto tsv = ContributionToTsv(m);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "record\tx\ty");
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 4);
  const auto j = ContributionToJson(m, &tree);
  EXPECT_EQ(j.at("records").size(), 3u);
  EXPECT_FALSE(ClusterOrderToTsv(m, tree).empty());
}

}  // namespace
}  // namespace hdpd::diagram
