#ifndef HDPD_COHORT_DISEASE_RULES_H_
#define HDPD_COHORT_DISEASE_RULES_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "json.hpp"

namespace hdpd::cohort {

enum class Comparator { kGreaterEqual, kGreater, kLessEqual, kLess };

std::string_view ToString(Comparator op);
Comparator ParseComparator(std::string_view text);
bool Compare(double value, Comparator op, double cutoff);

struct ThresholdClause {
  std::string feature;
  Comparator op = Comparator::kGreaterEqual;
  double cutoff = 0;
};

// Fires when the (binary) flag feature equals 1, e.g. "on antidiabetic drugs".
struct MedicationClause {
  std::string feature;
};

using Clause = std::variant<ThresholdClause, MedicationClause>;

// Longitudinal decline rule on one biomarker, evaluated per participant:
// (i) `consecutive` successive measurements below `cutoff`, or
// (ii) when `regression` is set: some measurement below `cutoff` has occurred
// and the least-squares line over all measurements so far is at or below the
// cutoff at the latest measurement year. (ii) needs at least
// `min_regression_points` measurements.
struct LongitudinalRule {
  std::string feature;
  double cutoff = 60.0;
  int consecutive = 2;
  bool regression = true;
  int min_regression_points = 3;
};

// Positive iff any clause fires (disjunction).
struct DiseaseRule {
  std::string disease;
  std::vector<Clause> clauses;
  std::optional<LongitudinalRule> longitudinal;

  void Validate() const;
  // Names of all features read by the rule.
  std::vector<std::string> InputFeatures() const;
};

struct YearValue {
  int year = 0;
  double value = 0;
};

// Per-measurement labels for one participant's series (sorted by year).
// Throws InvalidArgument on an empty or unsorted series.
std::vector<bool> LabelLongitudinal(std::span<const YearValue> series,
                                    const LongitudinalRule& rule);

// Labels every cohort record (indexed like Cohort::records()). A label is
// missing when every input of every clause is missing for that record.
std::vector<std::optional<int>> LabelDisease(const Cohort& cohort,
                                             const DiseaseRule& rule);

// Criteria for the eleven diseases with conventional feature names
// (HbA1c, FPG, SBP, DBP, BMI, FEV1_FVC, baPWV, MMSE, T_score, LDL, HDL, TG,
// GLFS25, KL_grade, eGFR, and med_* flags).
std::vector<DiseaseRule> BuiltinRules();
DiseaseRule BuiltinRule(std::string_view disease);

nlohmann::json RuleToJson(const DiseaseRule& rule);
DiseaseRule RuleFromJson(const nlohmann::json& j);
DiseaseRule LoadRule(const std::filesystem::path& path);
void SaveRule(const std::filesystem::path& path, const DiseaseRule& rule);

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_DISEASE_RULES_H_
