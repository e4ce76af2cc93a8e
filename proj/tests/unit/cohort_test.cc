#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hdpd/cohort/cohort.h"
#include "hdpd/cohort/csv_io.h"
#include "hdpd/cohort/disease_rules.h"
#include "hdpd/cohort/horizon_dataset.h"
#include "hdpd/cohort/preprocess.h"
#include "hdpd/cohort/synthetic.h"
#include "hdpd/common/error.h"
#include "oracles.h"

namespace hdpd::cohort {
namespace {

Schema TwoFeatureSchema() {
  Schema s;
  s.features = {{"HbA1c", FeatureKind::kContinuous, {}, "%", RiskDirection::kHighIsRisk},
                {"smoker", FeatureKind::kBinary, {}, "", std::nullopt}};
  return s;
}

Cohort ParseText(const std::string& text, const Schema& schema) {
  std::istringstream in(text);
  return ParseCohortCsv(in, schema);
}

int ErrorLine(const std::string& text, const Schema& schema) {
  try {
    ParseText(text, schema);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(CohortCsv, EmptyCellBecomesMissing) {
  const auto c = ParseText("participant_id,year,HbA1c,smoker\np1,2005,5.4,0\np1,2006,,1\n",
                           TwoFeatureSchema());
  ASSERT_EQ(c.size(), 2u);
  int missing = 0;
  for (const auto& r : c.records()) {
    for (const auto& v : r.values) missing += !v.has_value();
  }
  EXPECT_EQ(missing, 1);
  EXPECT_FALSE(c.records()[1].values[0].has_value());
  EXPECT_EQ(*c.records()[1].values[1], 1.0);
}

TEST(CohortCsv, HeaderColumnsInAnyOrder) {
  const auto c = ParseText("participant_id,year,smoker,HbA1c\np1,2005,1,6.1\n",
                           TwoFeatureSchema());
  EXPECT_DOUBLE_EQ(*c.records()[0].values[0], 6.1);
  EXPECT_DOUBLE_EQ(*c.records()[0].values[1], 1.0);
}

TEST(CohortCsv, ErrorsCarryLineNumbers) {
  const auto schema = TwoFeatureSchema();
  const std::string header = "participant_id,year,HbA1c,smoker\n";
  EXPECT_EQ(ErrorLine(header + "p1,2005,5.4,0\np1,2006,abc,0\n", schema), 3);
  EXPECT_EQ(ErrorLine(header + "p1,2005,5.4\n", schema), 2);
  EXPECT_EQ(ErrorLine(header + "p1,20x5,5.4,0\n", schema), 2);
  EXPECT_EQ(ErrorLine(header + "p1,2005,5.4,2\n", schema), 2);
  EXPECT_EQ(ErrorLine("participant_id,year,HbA1c,BMI\n", schema), 1);
  EXPECT_EQ(ErrorLine("", schema), 1);
}

TEST(CohortCsv, DuplicateKeyRejected) {
  const std::string text =
      "participant_id,year,HbA1c,smoker\np1,2005,5.4,0\np2,2005,5.0,0\np1,2005,5.5,1\n";
  EXPECT_EQ(ErrorLine(text, TwoFeatureSchema()), 4);
}

TEST(CohortCsv, WriteParseRoundTrip) {
  Schema schema = TwoFeatureSchema();
  schema.features.push_back({"activity", FeatureKind::kCategorical, {"low", "mid", "high"}, "", {}});
  Cohort c(schema);
  c.AddRecord({"a", 2005, {0.1 + 0.2, 1.0, 2.0}});
  c.AddRecord({"a", 2006, {std::nullopt, 0.0, std::nullopt}});
  c.AddRecord({"b", 2005, {1.0 / 3.0, std::nullopt, 0.0}});
  std::ostringstream out;
  WriteCohortCsv(out, c);
  const auto back = ParseText(out.str(), schema);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.records()[i].Id(), c.records()[i].Id());
    EXPECT_EQ(back.records()[i].values, c.records()[i].values);
  }
  EXPECT_EQ(SchemaFromJson(SchemaToJson(schema)).features.size(), 3u);
}

TEST(CohortCsv, LargeCohortAccepted) {
  Schema schema = TwoFeatureSchema();
  std::ostringstream text;
  text << "participant_id,year,HbA1c,smoker\n";
  for (int p = 0; p < 3238; ++p) {
    for (int y = 0; y < 14; ++y) text << "p" << p << ',' << 2005 + y << ",5." << (p + y) % 10 << ",0\n";
  }
  const auto c = ParseText(text.str(), schema);
  EXPECT_EQ(c.size(), 3238u * 14u);
  EXPECT_EQ(c.Participants().size(), 3238u);
}

TEST(RecordId, RoundTrip) {
  Record r{"p:17", 2009, {}};
  const auto [p, y] = ParseRecordId(r.Id());
  EXPECT_EQ(p, "p:17");
  EXPECT_EQ(y, 2009);
  EXPECT_THROW(ParseRecordId("nocolon"), InvalidArgument);
}

// One record per builtin feature so a rule can be probed one value at a time.
Cohort SingleValueCohort(const std::string& feature, double value) {
  Schema s;
  s.features = {{feature, FeatureKind::kContinuous, {}, "", {}}};
  Cohort c(s);
  c.AddRecord({"p", 2005, {value}});
  return c;
}

std::optional<int> LabelOne(const std::string& disease, const std::string& feature,
                            double value) {
  auto rule = BuiltinRule(disease);
  // Keep only the clause reading `feature`.
  std::erase_if(rule.clauses, [&](const Clause& c) {
    const auto* t = std::get_if<ThresholdClause>(&c);
    return !t || t->feature != feature;
  });
  return LabelDisease(SingleValueCohort(feature, value), rule)[0];
}

struct CutoffCase {
  std::string disease;
  std::string feature;
  double cutoff;
  // Labels just below, at and just above the cutoff.
  int below, at, above;
};

TEST(DiseaseRules, BoundaryInclusiveLabelsAtEachCutoff) {
  const std::vector<CutoffCase> cases = {
      {"diabetes", "HbA1c", 6.5, 0, 1, 1},     {"diabetes", "FPG", 126, 0, 1, 1},
      {"hypertension", "SBP", 140, 0, 1, 1},   {"hypertension", "DBP", 90, 0, 1, 1},
      {"obesity", "BMI", 25.0, 0, 1, 1},       {"copd", "FEV1_FVC", 0.70, 1, 0, 0},
      {"arteriosclerosis", "baPWV", 18, 0, 1, 1}, {"dementia", "MMSE", 23, 1, 1, 0},
      {"osteopenia", "T_score", -1.0, 1, 0, 0},  {"dyslipidemia", "LDL", 120, 0, 1, 1},
      {"dyslipidemia", "HDL", 40, 1, 0, 0},      {"dyslipidemia", "TG", 150, 0, 1, 1},
      {"ls", "GLFS25", 16, 0, 1, 1},             {"koa", "KL_grade", 2, 0, 1, 1},
  };
  for (const auto& c : cases) {
    const double eps = std::abs(c.cutoff) < 10 ? 0.01 : 1.0;
    EXPECT_EQ(LabelOne(c.disease, c.feature, c.cutoff - eps), c.below) << c.feature;
    EXPECT_EQ(LabelOne(c.disease, c.feature, c.cutoff), c.at) << c.feature;
    EXPECT_EQ(LabelOne(c.disease, c.feature, c.cutoff + eps), c.above) << c.feature;
  }
}

TEST(DiseaseRules, HypertensionJustBelowBothCutoffsIsNegative) {
  Schema s;
  s.features = {{"SBP", FeatureKind::kContinuous, {}, "", {}},
                {"DBP", FeatureKind::kContinuous, {}, "", {}},
                {"med_hypertension", FeatureKind::kBinary, {}, "", {}}};
  Cohort c(s);
  c.AddRecord({"p", 2005, {139.0, 89.0, 0.0}});
  c.AddRecord({"p", 2006, {139.0, 89.0, 1.0}});
  c.AddRecord({"p", 2007, {std::nullopt, std::nullopt, std::nullopt}});
  const auto labels = LabelDisease(c, BuiltinRule("hypertension"));
  EXPECT_EQ(labels[0], 0);
  EXPECT_EQ(labels[1], 1);
  EXPECT_FALSE(labels[2].has_value());
}

TEST(DiseaseRules, JsonRoundTrip) {
  for (const auto& rule : BuiltinRules()) {
    const auto back = RuleFromJson(RuleToJson(rule));
    EXPECT_EQ(RuleToJson(back), RuleToJson(rule));
  }
  EXPECT_EQ(BuiltinRules().size(), 11u);
  EXPECT_THROW(BuiltinRule("gout"), NotFound);
  EXPECT_THROW(RuleFromJson(nlohmann::json{{"clauses", 1}}), ParseError);
}

std::vector<YearValue> Series(std::initializer_list<double> values) {
  std::vector<YearValue> s;
  int y = 2005;
  for (const double v : values) s.push_back({y++, v});
  return s;
}

TEST(CkdRule, Examples) {
  const LongitudinalRule rule;
  EXPECT_EQ(LabelLongitudinal(Series({65, 59, 58}), rule), (std::vector<bool>{false, false, true}));
  EXPECT_EQ(LabelLongitudinal(Series({90, 90, 90}), rule), (std::vector<bool>{false, false, false}));
  EXPECT_TRUE(LabelLongitudinal(Series({70, 62, 55, 61}), rule).back());
  EXPECT_THROW(LabelLongitudinal(std::vector<YearValue>{}, rule), InvalidArgument);
  EXPECT_THROW(LabelLongitudinal(std::vector<YearValue>{{2006, 50}, {2005, 50}}, rule),
               InvalidArgument);
}

TEST(CkdRule, ConsecutiveRuleMatchesWindowScan) {
  std::mt19937_64 rng(2024);
  LongitudinalRule rule;
  rule.regression = false;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracle::RandomSeries(rng);
    ASSERT_EQ(LabelLongitudinal(s, rule), oracle::ConsecutiveBelow(s, 60.0, 2)) << "trial " << trial;
  }
}

TEST(CkdRule, FullRuleMatchesOracle) {
  std::mt19937_64 rng(77);
  const LongitudinalRule rule;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = oracle::RandomSeries(rng);
    const auto got = LabelLongitudinal(s, rule);
    const auto scan = oracle::ConsecutiveBelow(s, 60.0, 2);
    for (std::size_t t = 0; t < s.size(); ++t) {
      ASSERT_EQ(got[t], scan[t] || oracle::RegressionBelow(s, t, 60.0)) << "trial " << trial;
    }
  }
}

Cohort TinyLongitudinal() {
  Schema s;
  s.features = {{"HbA1c", FeatureKind::kContinuous, {}, "", {}}};
  Cohort c(s);
  // a: negative 2005, positive 2007.  b: positive 2005.  c: lone record.
  c.AddRecord({"a", 2005, {5.5}});
  c.AddRecord({"a", 2007, {6.8}});
  c.AddRecord({"a", 2012, {5.0}});
  c.AddRecord({"b", 2005, {7.0}});
  c.AddRecord({"b", 2006, {5.0}});
  c.AddRecord({"c", 2005, {5.0}});
  return c;
}

TEST(HorizonDataset, EligibilityAndLabels) {
  const auto c = TinyLongitudinal();
  const DiseaseRule rule{"diabetes", {ThresholdClause{"HbA1c", Comparator::kGreaterEqual, 6.5}}, {}};
  const auto labels = LabelDisease(c, rule);
  const auto ds = BuildHorizonDataset(c, labels, 3, "diabetes");
  std::map<std::string, int> rows;
  for (const auto& r : ds.rows) rows[c.records()[r.record_index].Id()] = r.label;
  // a:2005 negative with a positive at +2; b:2005 currently positive; c has no future.
  EXPECT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows.at("a:2005"), 1);
  for (const auto& r : ds.rows) EXPECT_EQ(labels[r.record_index], 0);

  const auto current = BuildHorizonDataset(c, labels, 0, "diabetes");
  EXPECT_EQ(current.rows.size(), c.size());
}

TEST(HorizonDataset, NoCurrentlyPositiveRowsOnSynthetic) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 200;
  const auto syn = GenerateSynthetic(config);
  for (const auto& rule : syn.rules) {
    const auto labels = LabelDisease(syn.cohort, rule);
    const auto ds = BuildHorizonDataset(syn.cohort, labels, 3, rule.disease);
    EXPECT_FALSE(ds.rows.empty());
    for (const auto& r : ds.rows) {
      ASSERT_EQ(labels[r.record_index], 0);
      const auto future = FutureRecords(syn.cohort, r.record_index, 3);
      bool any = false;
      for (const auto f : future) any = any || labels[f] == 1;
      ASSERT_EQ(any, r.label == 1);
    }
  }
}

TEST(Split, EightyTwentyOfTen) {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("p" + std::to_string(i));
  const auto split = SplitByParticipant(ids, 0.8, 3);
  int train = 0;
  for (const auto& [_, s] : split) train += s == Split::kTrain;
  EXPECT_EQ(split.size(), 10u);
  EXPECT_EQ(train, 8);
  EXPECT_EQ(SplitByParticipant(ids, 0.8, 3), split);
}

TEST(Split, PartitionPropertyOverSizesAndSeeds) {
  for (int n = 1; n <= 60; n += 7) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (const double f : {0.2, 0.5, 0.8}) {
        const auto split = SplitByParticipant(ids, f, seed);
        ASSERT_EQ(split.size(), ids.size());
        int train = 0;
        for (const auto& [_, s] : split) train += s == Split::kTrain;
        EXPECT_LE(std::abs(train - f * n), 1.0);
      }
    }
  }
}

// Cohort with a 30%-missing feature, a numeric feature and a 3-level categorical.
Cohort PreprocessCohort() {
  Schema s;
  s.features = {{"sparse", FeatureKind::kContinuous, {}, "", {}},
                {"x", FeatureKind::kContinuous, {}, "", {}},
                {"grade", FeatureKind::kCategorical, {"a", "b", "c"}, "", {}}};
  Cohort c(s);
  for (int i = 0; i < 10; ++i) {
    std::optional<double> sparse = i < 3 ? std::nullopt : std::optional<double>(i);
    c.AddRecord({"t" + std::to_string(i), 2005, {sparse, double(i % 3 + 1), double(i % 3)}});
  }
  c.AddRecord({"test", 2005, {1.0, std::nullopt, std::nullopt}});
  return c;
}

TEST(Preprocess, DropImputeAndOneHot) {
  const auto c = PreprocessCohort();
  LabeledDataset ds;
  ds.disease = "d";
  for (std::size_t i = 0; i < c.size(); ++i) ds.rows.push_back({i, int(i % 2)});
  for (const auto& p : c.Participants()) ds.split[p] = p == "test" ? Split::kTest : Split::kTrain;
  const auto prep = Preprocess(c, ds);
  const auto& pp = prep.preprocessor;
  EXPECT_EQ(pp.dropped(), std::vector<std::string>{"sparse"});
  ASSERT_EQ(pp.columns().size(), 4u);
  ASSERT_EQ(pp.groups().size(), 1u);
  EXPECT_EQ(pp.groups()[0].columns.size(), 3u);

  const auto test_row = pp.Transform(c.records().back());
  const auto x = *pp.ColumnIndex("x");
  // Training x values cycle {1,2,3}: median 2.
  EXPECT_DOUBLE_EQ(test_row.values[x], 2.0);
  EXPECT_TRUE(test_row.missing[x]);

  for (std::size_t r = 0; r < prep.size(); ++r) {
    for (std::size_t col = 0; col < prep.values.cols(); ++col) {
      ASSERT_FALSE(std::isnan(prep.values(r, col)));
    }
  }
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const auto row = pp.Transform(c.records()[i]);
    double sum = 0;
    for (const auto col : pp.groups()[0].columns) sum += row.values[col];
    EXPECT_EQ(sum, 1.0);
  }
  const auto back = Preprocessor::FromJson(pp.ToJson());
  EXPECT_EQ(back.Transform(c.records()[4]).values, pp.Transform(c.records()[4]).values);
}

TEST(Preprocess, LowerMedianOnEvenCounts) {
  EXPECT_DOUBLE_EQ(LowerMedian({4, 1, 3, 2}), 2.0);
  EXPECT_DOUBLE_EQ(LowerMedian({1, 2, 3}), 2.0);
  EXPECT_TRUE(std::isnan(LowerMedian({kMissing})));
}

TEST(Synthetic, SameSeedGivesIdenticalCohort) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 150;
  std::ostringstream a, b, c;
  WriteCohortCsv(a, GenerateSynthetic(config).cohort);
  WriteCohortCsv(b, GenerateSynthetic(config).cohort);
  config.seed = 2;
  WriteCohortCsv(c, GenerateSynthetic(config).cohort);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
  EXPECT_EQ(SyntheticConfigToJson(SyntheticConfigFromJson(SyntheticConfigToJson(config))),
            SyntheticConfigToJson(config));
}

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Synthetic, ZeroCoefficientFeatureIsUnrelatedToOnset) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 2000;
  // hemoglobin carries no planted coefficient; detach it from the shared factors.
  for (auto& f : config.features) {
    if (f.name == "hemoglobin") f.loading = f.fast_loading = 0.0;
  }
  const auto syn = GenerateSynthetic(config);
  const auto hb = *syn.cohort.schema().IndexOf("hemoglobin");
  const auto& onset = syn.planted_onset.at("diabetes");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < syn.cohort.size(); ++i) {
    const auto& v = syn.cohort.records()[i].values[hb];
    if (!v) continue;
    x.push_back(*v);
    y.push_back(onset[i]);
  }
  ASSERT_GE(x.size(), 10000u);
  EXPECT_LT(std::abs(Correlation(x, y)), 0.05);
}

TEST(Synthetic, ZeroStrengthInterventionLeavesOnsetRatesEqual) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 3000;
  config.intervention.strength = 0.0;
  const auto syn = GenerateSynthetic(config);
  for (const auto& [disease, onset] : syn.planted_onset) {
    // Onset by the last visit, per participant.
    double n1 = 0, x1 = 0, n0 = 0, x0 = 0;
    for (const auto& p : syn.cohort.Participants()) {
      const auto recs = syn.cohort.ParticipantRecords(p);
      const int ever = onset[recs.back()];
      if (syn.intervened.count(p)) {
        n1 += 1;
        x1 += ever;
      } else {
        n0 += 1;
        x0 += ever;
      }
    }
    ASSERT_GT(n1, 0);
    const double pooled = (x1 + x0) / (n1 + n0);
    const double se = std::sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n0));
    EXPECT_LT(std::abs(x1 / n1 - x0 / n0), 2 * se) << disease;
  }
}

TEST(Synthetic, PlantedInterventionLowersOnset) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 3000;
  const auto syn = GenerateSynthetic(config);
  const auto& onset = syn.planted_onset.at("ckd");
  double n1 = 0, x1 = 0, n0 = 0, x0 = 0;
  for (const auto& p : syn.cohort.Participants()) {
    const int ever = onset[syn.cohort.ParticipantRecords(p).back()];
    (syn.intervened.count(p) ? n1 : n0) += 1;
    (syn.intervened.count(p) ? x1 : x0) += ever;
  }
  EXPECT_LT(x1 / n1, x0 / n0);
}

TEST(Synthetic, RuleLabelsFollowPlantedOnset) {
  auto config = DefaultSyntheticConfig();
  config.n_participants = 300;
  const auto syn = GenerateSynthetic(config);
  for (const auto& rule : syn.rules) {
    if (rule.longitudinal) continue;
    const auto labels = LabelDisease(syn.cohort, rule);
    const auto& planted = syn.planted_onset.at(rule.disease);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!labels[i]) continue;
      ASSERT_EQ(*labels[i], planted[i]) << rule.disease;
    }
  }
}

TEST(Synthetic, ConfigValidation) {
  auto config = DefaultSyntheticConfig();
  config.latent_persistence = 1.0;
  EXPECT_THROW(GenerateSynthetic(config), InvalidArgument);
  config = DefaultSyntheticConfig();
  config.diseases[0].coefficients["no_such_feature"] = 1.0;
  EXPECT_THROW(GenerateSynthetic(config), InvalidArgument);
}

}  // namespace
}  // namespace hdpd::cohort
