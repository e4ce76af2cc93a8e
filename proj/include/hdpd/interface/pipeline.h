#ifndef HDPD_INTERFACE_PIPELINE_H_
#define HDPD_INTERFACE_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/cohort/disease_rules.h"
#include "hdpd/cohort/preprocess.h"
#include "hdpd/diagram/analytics.h"
#include "hdpd/diagram/builder.h"
#include "hdpd/eval/report.h"
#include "hdpd/pmice/grid.h"
#include "hdpd/pmice/projector.h"
#include "hdpd/predictor/gbdt_trainer.h"
#include "hdpd/predictor/metrics.h"
#include "hdpd/predictor/model_selection.h"
#include "hdpd/predictor/tree_ensemble.h"
#include "json.hpp"

namespace hdpd::interface {

struct TrainOptions {
  int horizon_years = 3;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 7;
  std::uint64_t seed = 11;  // folds and trainer
  predictor::TrainConfig train;
  std::size_t rfe_target = 25;  // 0 disables elimination
  std::size_t rfe_step = 1;
  int folds = 5;
  cohort::PreprocessOptions preprocess;
  pmice::GridConfig grid;
  pmice::ProjectionConfig projection;

  nlohmann::json ToJson() const;
};

inline constexpr int kDiseaseModelVersion = 1;

// Persisted per-disease artifact: everything needed to rebuild the dataset,
// the model inputs and the p-mICE configuration from the cohort.
struct DiseaseModel {
  std::string disease;
  int horizon_years = 3;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 7;
  std::uint64_t seed = 11;
  cohort::PreprocessOptions preprocess;
  cohort::Preprocessor preprocessor;
  std::vector<std::size_t> model_columns;  // into preprocessor columns
  predictor::FittedModel model;            // features = selected column names
  predictor::TrainConfig train;
  std::vector<double> fold_thresholds;
  std::vector<predictor::RfeStep> rfe_trace;
  pmice::GridConfig grid;
  pmice::ProjectionConfig projection;
  std::vector<eval::KScore> k_table;
  std::optional<double> test_auc;
  predictor::ConfusionCounts test_confusion;

  nlohmann::json ToJson() const;
  static DiseaseModel FromJson(const nlohmann::json& j);
};

// Labels the cohort, builds the horizon dataset, splits by participant,
// preprocesses, optionally eliminates features, selects the threshold by
// participant-grouped CV and fits the final model on the training split.
DiseaseModel TrainDiseaseModel(const cohort::Cohort& cohort, const cohort::DiseaseRule& rule,
                               const TrainOptions& options);

// In-memory state for diagrams and evaluation of one disease model.
class DiseaseSession {
 public:
  DiseaseSession(const cohort::Cohort& cohort, cohort::DiseaseRule rule, DiseaseModel model);

  DiseaseSession(const DiseaseSession&) = delete;
  DiseaseSession& operator=(const DiseaseSession&) = delete;

  const cohort::Cohort& cohort() const { return cohort_; }
  const cohort::DiseaseRule& rule() const { return rule_; }
  const DiseaseModel& model() const { return model_; }
  DiseaseModel& mutable_model() { return model_; }
  const cohort::PreparedDataset& data() const { return data_; }
  const pmice::ReferenceData& reference() const { return reference_; }
  const pmice::FeatureSpace& space() const { return space_; }
  const std::vector<std::string>& features() const { return model_.model.features(); }
  std::optional<std::size_t> FeatureIndex(std::string_view name) const;

  diagram::DiagramContext Context() const;
  // Any cohort record in model-feature space.
  diagram::RecordView View(std::size_t record_index) const;
  // Later records within the horizon, sorted by year, NaN where unmeasured.
  std::vector<eval::FuturePoint> Futures(std::size_t record_index) const;
  double Score(std::size_t record_index) const;

  // Predicted-onset training rows with at least one future record.
  std::vector<eval::TuningRecord> TuningRecords() const;
  std::vector<eval::EvalRecord> TestRecords() const;
  // Cohort indices of predicted-onset test records, sorted by record id.
  std::vector<std::size_t> PredictedOnsetTest() const;

  eval::TuneKResult TuneK(std::span<const int> k_grid, std::size_t max_records = 0) const;
  eval::DiseaseEvaluation Evaluate(const eval::EvaluationOptions& options,
                                   const eval::ProgressFn& progress = {}) const;

 private:
  const cohort::Cohort& cohort_;
  cohort::DiseaseRule rule_;
  DiseaseModel model_;
  cohort::PreparedDataset data_;
  pmice::ReferenceData reference_;
  pmice::FeatureSpace space_;
};

// Full-search diagrams for every measured pair of each record, reduced to
// per-record feature contributions. Rows keep the order of `records`.
diagram::ContributionMatrix ContributionAnalysis(const DiseaseSession& session,
                                                 std::span<const std::size_t> records,
                                                 diagram::DiagramMode mode,
                                                 std::vector<diagram::Diagram>* diagrams = nullptr);

// Rebuilds the prepared dataset of a stored model (same labels, split and
// preprocessing).
cohort::PreparedDataset PrepareFor(const cohort::Cohort& cohort, const cohort::DiseaseRule& rule,
                                   const DiseaseModel& model);

}  // namespace hdpd::interface

#endif  // HDPD_INTERFACE_PIPELINE_H_
