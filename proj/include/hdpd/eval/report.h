#ifndef HDPD_EVAL_REPORT_H_
#define HDPD_EVAL_REPORT_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdpd/diagram/builder.h"
#include "hdpd/eval/statistics.h"
#include "hdpd/eval/validation.h"
#include "json.hpp"

namespace hdpd::eval {

// A test-split record with its model score, outcome label and later
// measurements within the horizon.
struct EvalRecord {
  diagram::RecordView view;
  double score = 0.0;
  int label = 0;
  std::vector<FuturePoint> futures;
};

struct EvaluationOptions {
  diagram::DiagramMode mode = diagram::DiagramMode::kPmice;
  bool tune_k = true;
  std::vector<int> k_grid = DefaultKGrid();
  // Deterministic subsample (by record id) of the tuning records; 0 = all.
  std::size_t max_tuning_records = 0;
};

struct GroupSummary {
  std::size_t records = 0;             // predicted-onset records in the group
  std::vector<std::string> record_ids;  // those with a defined proportion
  std::vector<double> proportions;
  double median = 0.0;
  double mean = 0.0;
};

struct RecordDetail {
  std::string record_id;
  Outcome outcome = Outcome::kActualOnset;
  double score = 0.0;
  std::optional<double> improved;
  std::optional<double> bivariate;
  std::optional<ApproachedResult> approached;
  std::size_t diagrams = 0;
};

struct DiseaseEvaluation {
  std::string disease;
  int horizon_years = 0;
  double threshold = 0.0;
  std::optional<double> test_auc;
  int k = 0;
  std::vector<KScore> k_table;
  GroupSummary prevented;
  GroupSummary actual;
  std::optional<RankSumResult> improved_test;  // prevented vs actual
  std::size_t approached_records = 0;
  double approached_mean = 0.0;
  double approached_sd = 0.0;
  std::optional<PairedTResult> approached_test;  // d(ice) vs d(projected)
  std::vector<RecordDetail> records;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Runs the retrospective validation: optional k tuning on `tuning` records,
// p-mICE diagrams for every predicted-onset test record, improved-HDPD
// proportions per outcome group with a rank-sum test, and the approached
// distance with a paired t-test. `context.projection.k` is replaced by the
// tuned k when tuning is enabled.
DiseaseEvaluation Evaluate(diagram::DiagramContext context, std::span<const EvalRecord> test,
                           std::span<const TuningRecord> tuning, const EvaluationOptions& options,
                           const ProgressFn& progress = {});

nlohmann::json EvaluationToJson(const DiseaseEvaluation& evaluation);

// Plain-text tables: disease, approached distance mean +- sd, p, k; and
// disease, group medians, rank-sum p.
std::string ApproachedTable(std::span<const DiseaseEvaluation> evaluations);
std::string GroupTable(std::span<const DiseaseEvaluation> evaluations);

}  // namespace hdpd::eval

#endif  // HDPD_EVAL_REPORT_H_
