#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "hdpd/common/error.h"
#include "hdpd/common/matrix.h"
#include "hdpd/pmice/domain.h"
#include "hdpd/pmice/grid.h"
#include "hdpd/pmice/neighbors.h"
#include "hdpd/pmice/projector.h"
#include "hdpd/predictor/tree_ensemble.h"

namespace hdpd::pmice {
namespace {

std::vector<double> Range(double from, double to, double step) {
  std::vector<double> out;
  for (double v = from; v <= to + 1e-9; v += step) out.push_back(v);
  return out;
}

void ExpectValues(const Axis& axis, const std::vector<double>& expected) {
  ASSERT_EQ(axis.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(axis.values[i], expected[i], 1e-9);
}

TEST(Axis, CentredValueGivesTwentyOneSteps) {
  const auto axis = BuildAxis(50, {0, 100}, false);
  ExpectValues(axis, Range(10, 90, 4));
  EXPECT_EQ(axis.origin, 10u);
}

TEST(Axis, OffsetsBeyondDomainDropped) {
  const auto axis = BuildAxis(95, {0, 100}, false);
  ExpectValues(axis, Range(55, 99, 4));
  EXPECT_EQ(axis.origin, 10u);
  for (const double v : axis.values) EXPECT_LE(v, 100.0);
}

TEST(Axis, BinaryAndDegenerateDomains) {
  ExpectValues(BuildAxis(1, {0, 1}, true), {0, 1});
  EXPECT_EQ(BuildAxis(0, {0, 1}, true).origin, 0u);
  EXPECT_EQ(BuildAxis(1, {0, 1}, true).origin, 1u);
  ExpectValues(BuildAxis(7, {7, 7}, false), {7});
  // An outlier keeps its own value.
  const auto outlier = BuildAxis(130, {0, 100}, false);
  EXPECT_EQ(outlier.values[outlier.origin], 130.0);
}

TEST(Axis, PropertiesOnRandomDomains) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50, 150);
  for (int trial = 0; trial < 2000; ++trial) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double v0 = u(rng);
    const auto axis = BuildAxis(v0, {lo, hi}, false);
    ASSERT_GE(axis.size(), 1u);
    ASSERT_LE(axis.size(), 21u);
    ASSERT_EQ(axis.values[axis.origin], v0);
    for (std::size_t i = 1; i < axis.size(); ++i) ASSERT_LT(axis.values[i - 1], axis.values[i]);
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (i != axis.origin) {
        ASSERT_GE(axis.values[i], lo);
        ASSERT_LE(axis.values[i], hi);
      }
    }
  }
}

TEST(Domain, PercentilesByInterpolation) {
  std::vector<double> v;
  for (int i = 0; i <= 200; ++i) v.push_back(i);
  std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
  const auto d = ComputeDomain(v);
  EXPECT_NEAR(d.lo, 1.0, 1e-12);
  EXPECT_NEAR(d.hi, 199.0, 1e-12);
  const std::vector<double> sorted{1, 2, 4};
  EXPECT_DOUBLE_EQ(Percentile(sorted, 0.75), 3.0);
  const auto c = ComputeDomain(std::vector<double>{5, 5, 5, kMissing});
  EXPECT_EQ(c.lo, 5.0);
  EXPECT_EQ(c.hi, 5.0);
  EXPECT_THROW(ComputeDomain(std::vector<double>{kMissing}), InvalidArgument);
}

TEST(Domain, DiscreteColumnsGetUnitRange) {
  Matrix m(3, 2);
  m(0, 0) = 3;
  m(1, 0) = 9;
  m(2, 0) = 6;
  const auto d = ComputeDomains(m, {false, true});
  EXPECT_EQ(d[1].lo, 0.0);
  EXPECT_EQ(d[1].hi, 1.0);
  EXPECT_GT(d[0].width(), 0.0);
}

TEST(Grid, PerturbationPointsDifferOnlyAtPair) {
  const std::vector<double> record{50, 1, 20, 3};
  const std::vector<FeatureDomain> domains{{0, 100}, {0, 1}, {0, 40}, {0, 10}};
  const std::vector<bool> discrete{false, true, false, false};
  const auto grid = MakeGrid(record, 0, 2, domains, discrete);
  EXPECT_EQ(grid.cells(), 21u * 21u);
  const auto points = Perturb2d(record, grid);
  ASSERT_EQ(points.size(), 441u);
  EXPECT_EQ(points[grid.OriginCell()], record);
  for (std::size_t c = 0; c < points.size(); ++c) {
    EXPECT_EQ(points[c][1], record[1]);
    EXPECT_EQ(points[c][3], record[3]);
    EXPECT_EQ(points[c][0], grid.x.values[c % grid.nx()]);
    EXPECT_EQ(points[c][2], grid.y.values[c / grid.nx()]);
  }
  EXPECT_EQ(MakeGrid(record, 1, 2, domains, discrete).cells(), 2u * 21u);
  EXPECT_THROW(MakeGrid(record, 2, 2, domains, discrete), InvalidArgument);
  EXPECT_THROW(MakeGrid(record, 0, 7, domains, discrete), InvalidArgument);
}

TEST(Ice, StumpGivesStepAtThreshold) {
  predictor::TreeEnsemble model;
  model.features = {"a", "b"};
  predictor::TreeNode root;
  root.feature = 0;
  root.threshold = 47;
  root.left = 1;
  root.right = 2;
  predictor::TreeNode lo, hi;
  lo.leaf = -1;
  hi.leaf = 1;
  model.trees.push_back({root, lo, hi});
  const std::vector<double> record{50, 3};
  const auto axis = BuildAxis(50, {0, 100}, false);
  const auto curve = IceCurve(model, record, 0, axis);
  ASSERT_EQ(curve.size(), axis.size());
  for (const auto& [v, p] : curve) {
    EXPECT_DOUBLE_EQ(p, predictor::Logistic(v < 47 ? -1 : 1));
  }
  EXPECT_DOUBLE_EQ(curve[axis.origin].second, model.PredictProba(record));
}

FeatureSpace MixedSpace() {
  FeatureSpace s;
  s.discrete = {false, false, true, false, true};
  s.domains = {{0, 10}, {0, 2}, {0, 1}, {5, 5}, {0, 1}};
  return s;
}

TEST(Distance, ScalingAndSymmetry) {
  const auto space = MixedSpace();
  const std::vector<double> a{0, 1, 0, 5, 1};
  std::vector<double> b = a;
  EXPECT_EQ(NormalizedDistance(a, b, space), 0.0);
  b[0] = 10;
  EXPECT_DOUBLE_EQ(NormalizedDistance(a, b, space), 1.0);
  b[2] = 1;
  b[3] = 99;
  EXPECT_DOUBLE_EQ(NormalizedDistance(a, b, space), 1.0);
  EXPECT_EQ(DiscreteMismatches(a, b, space), 1);
  b[1] = kMissing;
  EXPECT_DOUBLE_EQ(NormalizedDistance(a, b, space), 1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 10);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(5), y(5);
    for (int j = 0; j < 5; ++j) {
      x[j] = u(rng);
      y[j] = u(rng);
    }
    EXPECT_EQ(NormalizedDistance(x, y, space), NormalizedDistance(y, x, space));
  }
}

TEST(Weights, ExamplesAndNormalisation) {
  const auto w = ProjectionWeights(std::vector<double>{0.0, std::log(2.0)}, WeightScheme::kExponential);
  EXPECT_NEAR(w[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(ProjectionWeights(std::vector<double>{3.7}, WeightScheme::kExponential),
            std::vector<double>{1.0});
  for (const double v : ProjectionWeights(std::vector<double>{0, 1, 5}, WeightScheme::kUniform)) {
    EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  }
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 64);
  std::exponential_distribution<double> dist(0.5);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> d(size(rng));
    for (auto& x : d) x = dist(rng);
    for (const auto scheme :
         {WeightScheme::kExponential, WeightScheme::kInverseDistance, WeightScheme::kUniform}) {
      const auto weights = ProjectionWeights(d, scheme);
      ASSERT_NEAR(std::accumulate(weights.begin(), weights.end(), 0.0), 1.0, 1e-12);
      for (const double x : weights) ASSERT_GE(x, 0.0);
    }
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    const auto e = ProjectionWeights(d, WeightScheme::kExponential);
    for (std::size_t i = 1; i < e.size(); ++i) ASSERT_LT(e[i], e[i - 1]);
  }
}

TEST(Project, AveragesAndKeepsIntervention) {
  const std::vector<double> point{100, 200, 300};
  const std::vector<double> a{10, 1, kMissing}, b{20, 3, kMissing};
  const std::vector<std::span<const double>> rows{a, b};
  const std::vector<std::size_t> intervention{1};
  const auto out = Project(point, intervention, rows, std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(out[0], 15.0);
  EXPECT_DOUBLE_EQ(out[1], 200.0);
  EXPECT_DOUBLE_EQ(out[2], 300.0);
  const std::vector<double> c{kMissing, 0, 9};
  const std::vector<std::span<const double>> rows2{a, c};
  const auto renorm = Project(point, intervention, rows2, std::vector<double>{0.25, 0.75});
  EXPECT_DOUBLE_EQ(renorm[0], 10.0);
  EXPECT_DOUBLE_EQ(renorm[2], 9.0);
}

struct Pool {
  Matrix rows;
  std::vector<int> labels;
};

Pool RandomPool(std::mt19937_64& rng, std::size_t n, bool with_ties) {
  std::uniform_real_distribution<double> u(0, 10);
  std::uniform_int_distribution<int> bit(0, 1), coarse(0, 4);
  Pool p{Matrix(n, 5), {}};
  for (std::size_t i = 0; i < n; ++i) {
    p.rows(i, 0) = with_ties ? coarse(rng) * 2.5 : u(rng);
    p.rows(i, 1) = with_ties ? coarse(rng) * 0.5 : u(rng) / 5;
    p.rows(i, 2) = bit(rng);
    p.rows(i, 3) = 5;
    p.rows(i, 4) = bit(rng);
    if (!with_ties && bit(rng) && bit(rng)) p.rows(i, 1) = kMissing;
    p.labels.push_back(bit(rng));
  }
  return p;
}

// Contract of KnnCandidates written out directly: filter, stratify or
// penalise, full sort.
std::vector<Neighbor> KnnOracle(std::span<const double> point, std::span<const double> original,
                                const Pool& pool, int label, const FeatureSpace& space, int k,
                                bool stratify, const std::vector<bool>& excluded) {
  struct Cand {
    std::ptrdiff_t row;
    double distance;
    int mismatch;
  };
  auto dist = [&](std::span<const double> r) {
    double s = 0;
    for (std::size_t c = 0; c < space.size(); ++c) {
      if (space.discrete[c] || space.domains[c].width() <= 0) continue;
      if (std::isnan(r[c]) || std::isnan(point[c])) continue;
      const double d = (r[c] - point[c]) / space.domains[c].width();
      s += d * d;
    }
    return std::sqrt(s);
  };
  auto mism = [&](std::span<const double> r) {
    int m = 0;
    for (std::size_t c = 0; c < space.size(); ++c) {
      if (!space.discrete[c] || std::isnan(r[c]) || std::isnan(point[c])) continue;
      m += r[c] != point[c];
    }
    return m;
  };
  std::vector<Cand> all{{kOriginalRow, dist(original), mism(original)}};
  for (std::size_t i = 0; i < pool.rows.rows(); ++i) {
    if (pool.labels[i] != label || (!excluded.empty() && excluded[i])) continue;
    all.push_back({static_cast<std::ptrdiff_t>(i), dist(pool.rows.Row(i)), mism(pool.rows.Row(i))});
  }
  std::vector<Cand> strict;
  for (const auto& c : all) {
    if (c.mismatch == 0) strict.push_back(c);
  }
  const bool use_strict = stratify && strict.size() >= static_cast<std::size_t>(k);
  std::vector<Cand> ranked = use_strict ? strict : all;
  auto key = [&](const Cand& c) { return use_strict || !stratify ? c.distance : c.distance + c.mismatch; };
  std::sort(ranked.begin(), ranked.end(), [&](const Cand& a, const Cand& b) {
    return std::make_tuple(key(a), a.row) < std::make_tuple(key(b), b.row);
  });
  ranked.resize(std::min<std::size_t>(ranked.size(), k));
  std::vector<Neighbor> out;
  for (const auto& c : ranked) out.push_back({c.row, key(c)});
  return out;
}

TEST(Knn, MatchesFullSortOracle) {
  const auto space = MixedSpace();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> kdist(1, 12), sz(1, 200), bit(0, 1);
  for (int trial = 0; trial < 400; ++trial) {
    const bool ties = trial % 2 == 1;
    const auto pool = RandomPool(rng, sz(rng), ties);
    const auto probe = RandomPool(rng, 2, ties);
    const auto original = probe.rows.Row(0);
    std::vector<double> point(original.begin(), original.end());
    point[0] = probe.rows(1, 0);
    point[2] = probe.rows(1, 2);
    const int k = kdist(rng), label = bit(rng);
    std::vector<bool> excluded;
    if (trial % 3 == 0) {
      for (std::size_t i = 0; i < pool.rows.rows(); ++i) excluded.push_back(i % 4 == 0);
    }
    for (const bool stratify : {true, false}) {
      ProjectionConfig config;
      config.k = k;
      config.stratify_discrete = stratify;
      const auto got =
          KnnCandidates(point, original, pool.rows, pool.labels, label, space, config, excluded);
      const auto want = KnnOracle(point, original, pool, label, space, k, stratify, excluded);
      ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_EQ(got[i].row, want[i].row) << "trial " << trial << " rank " << i;
        ASSERT_NEAR(got[i].distance, want[i].distance, 1e-12);
      }
    }
  }
}

TEST(Knn, ZeroPerturbationKOneReturnsOriginal) {
  const auto space = MixedSpace();
  std::mt19937_64 rng(2);
  const auto pool = RandomPool(rng, 50, false);
  // A pool row identical to the record still loses the tie.
  Matrix dup = pool.rows;
  const std::vector<double> original(pool.rows.Row(7).begin(), pool.rows.Row(7).end());
  ProjectionConfig config;
  config.k = 1;
  const auto got = KnnCandidates(original, original, dup, pool.labels, pool.labels[7], space, config);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].row, kOriginalRow);
  EXPECT_EQ(got[0].distance, 0.0);
}

ReferenceData ToReference(const Pool& pool) {
  ReferenceData ref;
  ref.values = pool.rows;
  ref.labels = pool.labels;
  for (std::size_t i = 0; i < pool.rows.rows(); ++i) {
    ref.participants.push_back("p" + std::to_string(i % 9));
    ref.years.push_back(2005 + static_cast<int>(i % 5));
  }
  return ref;
}

TEST(PairProjector, AgreesWithGenericPath) {
  const auto space = MixedSpace();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 10);
  std::uniform_int_distribution<int> kdist(1, 10), bit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pool = RandomPool(rng, 120, trial % 2 == 1);
    const auto ref = ToReference(pool);
    const auto probe = RandomPool(rng, 1, false);
    const std::vector<double> original(probe.rows.Row(0).begin(), probe.rows.Row(0).end());
    const auto excluded = FutureExclusion(ref, "p3", 2007);
    const std::size_t fx = 0, fy = trial % 3 == 0 ? 2 : 1;
    const PairProjector projector(ref, space, original, fx, fy, excluded);
    const double x = u(rng), y = fy == 2 ? bit(rng) : u(rng) / 5;
    std::vector<double> point = original;
    point[fx] = x;
    point[fy] = y;
    ProjectionConfig config;
    config.k = kdist(rng);
    const int label = bit(rng);
    const auto want =
        KnnCandidates(point, original, ref.values, ref.labels, label, space, config, excluded);
    const auto got = projector.Neighbors(x, y, label, config.k);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].row, want[i].row) << "trial " << trial;
      ASSERT_NEAR(got[i].distance, want[i].distance, 1e-12);
    }
    std::vector<double> d;
    std::vector<std::span<const double>> rows;
    for (const auto& n : want) {
      d.push_back(n.distance);
      rows.push_back(n.row == kOriginalRow ? std::span<const double>(original)
                                           : ref.values.Row(static_cast<std::size_t>(n.row)));
    }
    const std::vector<std::size_t> intervention{fx, fy};
    const auto expected = Project(point, intervention, rows, ProjectionWeights(d, config.weights));
    const auto projected = projector.Project(x, y, label, config);
    for (std::size_t c = 0; c < expected.size(); ++c) {
      if (std::isnan(expected[c])) {
        ASSERT_TRUE(std::isnan(projected[c]));
        continue;
      }
      ASSERT_NEAR(projected[c], expected[c], 1e-12);
    }
  }
}

TEST(PairProjector, IdentityAtOriginWithKOne) {
  const auto space = MixedSpace();
  std::mt19937_64 rng(31);
  const auto pool = RandomPool(rng, 80, false);
  const auto ref = ToReference(pool);
  for (std::size_t r = 0; r < 20; ++r) {
    const std::vector<double> original(pool.rows.Row(r).begin(), pool.rows.Row(r).end());
    if (std::isnan(original[1])) continue;
    const PairProjector projector(ref, space, original, 0, 1);
    ProjectionConfig config;
    config.k = 1;
    for (const int label : {0, 1}) {
      const auto p = projector.Project(original[0], original[1], label, config);
      for (std::size_t c = 0; c < p.size(); ++c) {
        if (std::isnan(original[c])) continue;
        ASSERT_EQ(p[c], original[c]);
      }
    }
  }
}

TEST(PairProjector, FutureExclusionMask) {
  Pool pool{Matrix(4, 5), {0, 0, 0, 0}};
  ReferenceData ref;
  ref.values = pool.rows;
  ref.labels = pool.labels;
  ref.participants = {"a", "a", "a", "b"};
  ref.years = {2005, 2006, 2007, 2007};
  EXPECT_EQ(FutureExclusion(ref, "a", 2006), (std::vector<bool>{false, true, true, false}));
}

TEST(Config, Validation) {
  ProjectionConfig config;
  config.k = 0;
  EXPECT_THROW(config.Validate(), InvalidArgument);
  EXPECT_EQ(ParseWeightScheme(ToString(WeightScheme::kInverseDistance)), WeightScheme::kInverseDistance);
  EXPECT_EQ(ParsePoolLabel(ToString(PoolLabel::kOriginalRecord)), PoolLabel::kOriginalRecord);
  GridConfig grid;
  EXPECT_EQ(grid.Steps(), 10);
}

}  // namespace
}  // namespace hdpd::pmice
