#include "hdpd/cohort/disease_rules.h"

#include <algorithm>
#include <fstream>

#include "hdpd/common/error.h"

namespace hdpd::cohort {

std::string_view ToString(Comparator op) {
  switch (op) {
    case Comparator::kGreaterEqual:
      return ">=";
    case Comparator::kGreater:
      return ">";
    case Comparator::kLessEqual:
      return "<=";
    case Comparator::kLess:
      return "<";
  }
  return ">=";
}

Comparator ParseComparator(std::string_view text) {
  if (text == ">=" || text == "ge") return Comparator::kGreaterEqual;
  if (text == ">" || text == "gt") return Comparator::kGreater;
  if (text == "<=" || text == "le") return Comparator::kLessEqual;
  if (text == "<" || text == "lt") return Comparator::kLess;
  throw ParseError("unknown comparator '" + std::string(text) + "'");
}

bool Compare(double value, Comparator op, double cutoff) {
  switch (op) {
    case Comparator::kGreaterEqual:
      return value >= cutoff;
    case Comparator::kGreater:
      return value > cutoff;
    case Comparator::kLessEqual:
      return value <= cutoff;
    case Comparator::kLess:
      return value < cutoff;
  }
  return false;
}

void DiseaseRule::Validate() const {
  if (disease.empty()) throw InvalidArgument("disease rule without a name");
  if (clauses.empty() && !longitudinal) {
    throw InvalidArgument("disease rule '" + disease + "' has no clauses");
  }
  if (longitudinal && longitudinal->consecutive < 1) {
    throw InvalidArgument("longitudinal rule needs consecutive >= 1");
  }
}

std::vector<std::string> DiseaseRule::InputFeatures() const {
  std::vector<std::string> out;
  for (const auto& clause : clauses) {
    std::visit([&](const auto& c) { out.push_back(c.feature); }, clause);
  }
  if (longitudinal) out.push_back(longitudinal->feature);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<bool> LabelLongitudinal(std::span<const YearValue> series,
                                    const LongitudinalRule& rule) {
  if (series.empty()) throw InvalidArgument("empty longitudinal series");
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].year <= series[i - 1].year) {
      throw InvalidArgument("longitudinal series must be strictly increasing in year");
    }
  }
  std::vector<bool> labels(series.size(), false);
  int run = 0;
  bool seen_below = false;
  // Running sums for the least-squares line over series[0..t], centred on the
  // first year to keep the sums well conditioned.
  const double year0 = series.front().year;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    const double x = series[t].year - year0;
    const double y = series[t].value;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    const bool below = y < rule.cutoff;
    run = below ? run + 1 : 0;
    seen_below = seen_below || below;
    if (run >= rule.consecutive) {
      labels[t] = true;
      continue;
    }
    const auto n = static_cast<double>(t + 1);
    if (rule.regression && seen_below &&
        static_cast<int>(t + 1) >= rule.min_regression_points) {
      const double denom = n * sxx - sx * sx;
      if (denom > 0) {
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        labels[t] = intercept + slope * x <= rule.cutoff;
      }
    }
  }
  return labels;
}

std::vector<std::optional<int>> LabelDisease(const Cohort& cohort,
                                             const DiseaseRule& rule) {
  rule.Validate();
  struct ResolvedClause {
    std::size_t feature;
    bool medication;
    Comparator op;
    double cutoff;
  };
  std::vector<ResolvedClause> resolved;
  for (const auto& clause : rule.clauses) {
    if (const auto* t = std::get_if<ThresholdClause>(&clause)) {
      resolved.push_back({cohort.RequireFeature(t->feature), false, t->op, t->cutoff});
    } else {
      const auto& m = std::get<MedicationClause>(clause);
      resolved.push_back({cohort.RequireFeature(m.feature), true,
                          Comparator::kGreaterEqual, 1.0});
    }
  }

  const auto& records = cohort.records();
  std::vector<std::optional<int>> labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    bool any_input = false;
    bool fired = false;
    for (const auto& c : resolved) {
      const auto& v = records[i].values[c.feature];
      if (!v) continue;
      any_input = true;
      fired = fired || (c.medication ? *v == 1.0 : Compare(*v, c.op, c.cutoff));
    }
    if (any_input) labels[i] = fired ? 1 : 0;
  }

  if (rule.longitudinal) {
    const std::size_t feature = cohort.RequireFeature(rule.longitudinal->feature);
    for (const auto& participant : cohort.Participants()) {
      std::vector<YearValue> series;
      std::vector<std::size_t> owners;
      for (const std::size_t idx : cohort.ParticipantRecords(participant)) {
        if (const auto& v = records[idx].values[feature]) {
          series.push_back({records[idx].year, *v});
          owners.push_back(idx);
        }
      }
      if (series.empty()) continue;
      const auto flags = LabelLongitudinal(series, *rule.longitudinal);
      for (std::size_t t = 0; t < owners.size(); ++t) {
        auto& label = labels[owners[t]];
        label = (label.value_or(0) == 1 || flags[t]) ? 1 : 0;
      }
    }
  }
  return labels;
}

namespace {

ThresholdClause Threshold(std::string feature, Comparator op, double cutoff) {
  return ThresholdClause{std::move(feature), op, cutoff};
}

}  // namespace

std::vector<DiseaseRule> BuiltinRules() {
  using enum Comparator;
  std::vector<DiseaseRule> rules;
  rules.push_back({"arteriosclerosis", {Threshold("baPWV", kGreaterEqual, 18.0)}, {}});
  rules.push_back({"ckd", {}, LongitudinalRule{"eGFR", 60.0, 2, true, 3}});
  rules.push_back({"copd", {Threshold("FEV1_FVC", kLess, 0.70)}, {}});
  rules.push_back({"dementia",
                   {Threshold("MMSE", kLessEqual, 23.0), MedicationClause{"med_dementia"}},
                   {}});
  rules.push_back({"diabetes",
                   {Threshold("HbA1c", kGreaterEqual, 6.5),
                    Threshold("FPG", kGreaterEqual, 126.0),
                    MedicationClause{"med_diabetes"}},
                   {}});
  rules.push_back({"dyslipidemia",
                   {Threshold("LDL", kGreaterEqual, 120.0), Threshold("HDL", kLess, 40.0),
                    Threshold("TG", kGreaterEqual, 150.0),
                    MedicationClause{"med_dyslipidemia"}},
                   {}});
  rules.push_back({"hypertension",
                   {Threshold("SBP", kGreaterEqual, 140.0),
                    Threshold("DBP", kGreaterEqual, 90.0),
                    MedicationClause{"med_hypertension"}},
                   {}});
  rules.push_back({"ls", {Threshold("GLFS25", kGreaterEqual, 16.0)}, {}});
  rules.push_back({"obesity", {Threshold("BMI", kGreaterEqual, 25.0)}, {}});
  rules.push_back({"koa", {Threshold("KL_grade", kGreaterEqual, 2.0)}, {}});
  rules.push_back({"osteopenia", {Threshold("T_score", kLess, -1.0)}, {}});
  return rules;
}

DiseaseRule BuiltinRule(std::string_view disease) {
  for (auto& rule : BuiltinRules()) {
    if (rule.disease == disease) return rule;
  }
  throw NotFound("no builtin rule for disease '" + std::string(disease) + "'");
}

nlohmann::json RuleToJson(const DiseaseRule& rule) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& clause : rule.clauses) {
    if (const auto* t = std::get_if<ThresholdClause>(&clause)) {
      clauses.push_back(
          {{"feature", t->feature}, {"op", ToString(t->op)}, {"cutoff", t->cutoff}});
    } else {
      clauses.push_back({{"medication", std::get<MedicationClause>(clause).feature}});
    }
  }
  nlohmann::json j = {{"disease", rule.disease}, {"clauses", clauses}};
  if (rule.longitudinal) {
    const auto& l = *rule.longitudinal;
    j["longitudinal"] = {{"feature", l.feature},
                         {"cutoff", l.cutoff},
                         {"consecutive", l.consecutive},
                         {"regression", l.regression},
                         {"min_regression_points", l.min_regression_points}};
  }
  return j;
}

DiseaseRule RuleFromJson(const nlohmann::json& j) {
  DiseaseRule rule;
  try {
    rule.disease = j.at("disease").get<std::string>();
    for (const auto& c : j.value("clauses", nlohmann::json::array())) {
      if (c.contains("medication")) {
        rule.clauses.push_back(MedicationClause{c.at("medication").get<std::string>()});
      } else {
        rule.clauses.push_back(ThresholdClause{c.at("feature").get<std::string>(),
                                               ParseComparator(c.at("op").get<std::string>()),
                                               c.at("cutoff").get<double>()});
      }
    }
    if (j.contains("longitudinal")) {
      const auto& l = j.at("longitudinal");
      LongitudinalRule lr;
      lr.feature = l.at("feature").get<std::string>();
      lr.cutoff = l.value("cutoff", 60.0);
      lr.consecutive = l.value("consecutive", 2);
      lr.regression = l.value("regression", true);
      lr.min_regression_points = l.value("min_regression_points", 3);
      rule.longitudinal = lr;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("disease rule: ") + e.what());
  }
  rule.Validate();
  return rule;
}

DiseaseRule LoadRule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open rule file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return RuleFromJson(j);
}

void SaveRule(const std::filesystem::path& path, const DiseaseRule& rule) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << RuleToJson(rule).dump(2) << '\n';
}

}  // namespace hdpd::cohort
