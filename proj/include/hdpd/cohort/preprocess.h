#ifndef HDPD_COHORT_PREPROCESS_H_
#define HDPD_COHORT_PREPROCESS_H_

#include <optional>
#include <string>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/cohort/horizon_dataset.h"
#include "hdpd/common/matrix.h"
#include "json.hpp"

namespace hdpd::cohort {

// One model-input column after preprocessing. Categorical features expand to
// one binary column per level, named "feature=level".
struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;  // never kCategorical
  std::string source;                           // schema feature name
  std::optional<std::size_t> level;             // set for one-hot columns
  std::optional<RiskDirection> risk_direction;

  bool discrete() const { return kind != FeatureKind::kContinuous; }
};

struct OneHotGroup {
  std::string feature;
  std::vector<std::size_t> columns;
};

// A record in column space: `values` imputed, `missing` marks cells that were
// missing before imputation.
struct TransformedRow {
  std::vector<double> values;
  std::vector<bool> missing;
};

struct PreprocessOptions {
  // Features whose training missing fraction is >= this are dropped.
  double max_missing_fraction = 0.25;
};

// Column plan fitted on the training split: dropped features, fill values
// (median for numeric, lower middle on even counts; most frequent level for
// categorical) and one-hot expansion.
class Preprocessor {
 public:
  Preprocessor() = default;

  static Preprocessor Fit(const Cohort& cohort, const LabeledDataset& dataset,
                          const PreprocessOptions& options = {});

  TransformedRow Transform(const Record& record) const;

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<OneHotGroup>& groups() const { return groups_; }
  const std::vector<std::string>& dropped() const { return dropped_; }
  std::optional<std::size_t> ColumnIndex(std::string_view name) const;

  nlohmann::json ToJson() const;
  static Preprocessor FromJson(const nlohmann::json& j);

 private:
  struct Source {
    std::string name;
    std::size_t schema_index = 0;
    FeatureKind kind = FeatureKind::kContinuous;
    double fill = 0;
    std::size_t first_column = 0;
    std::size_t n_levels = 0;
  };
  std::size_t schema_width_ = 0;
  std::vector<Source> sources_;
  std::vector<Column> columns_;
  std::vector<OneHotGroup> groups_;
  std::vector<std::string> dropped_;
};

// The labelled dataset materialised in column space.
struct PreparedDataset {
  std::string disease;
  int horizon_years = 0;
  Preprocessor preprocessor;
  Matrix values;    // imputed
  Matrix observed;  // same cells, NaN where the raw value was missing
  std::vector<int> labels;
  std::vector<std::size_t> record_index;
  std::vector<std::string> participants;
  std::vector<int> years;
  std::vector<Split> split;

  std::size_t size() const { return labels.size(); }
  std::vector<std::size_t> RowsIn(Split which) const;
};

// Fits the preprocessor on the training rows (dataset.split must cover every
// row's participant) and transforms all rows.
PreparedDataset Preprocess(const Cohort& cohort, const LabeledDataset& dataset,
                           const PreprocessOptions& options = {});

// Transforms all rows with an already fitted preprocessor.
PreparedDataset Preprocess(const Cohort& cohort, const LabeledDataset& dataset,
                           Preprocessor preprocessor);

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_PREPROCESS_H_
