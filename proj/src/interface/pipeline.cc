#include "hdpd/interface/pipeline.h"

#include <algorithm>
#include <cmath>

#include "hdpd/cohort/horizon_dataset.h"
#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"
#include "hdpd/pmice/domain.h"
#include "hdpd/predictor/model_io.h"

namespace hdpd::interface {
namespace {

using nlohmann::json;

json TrainConfigToJson(const predictor::TrainConfig& c) {
  return {{"rounds", c.rounds},
          {"max_depth", c.max_depth},
          {"learning_rate", c.learning_rate},
          {"l2_lambda", c.l2_lambda},
          {"min_child_weight", c.min_child_weight},
          {"min_split_gain", c.min_split_gain},
          {"subsample", c.subsample},
          {"seed", c.seed}};
}

predictor::TrainConfig TrainConfigFromJson(const json& j) {
  predictor::TrainConfig c;
  c.rounds = j.at("rounds").get<int>();
  c.max_depth = j.at("max_depth").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2_lambda = j.at("l2_lambda").get<double>();
  c.min_child_weight = j.at("min_child_weight").get<double>();
  c.min_split_gain = j.at("min_split_gain").get<double>();
  c.subsample = j.at("subsample").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json GridToJson(const pmice::GridConfig& g) {
  return {{"step_fraction", g.step_fraction},
          {"max_fraction", g.max_fraction},
          {"percentile_clip", g.percentile_clip}};
}

pmice::GridConfig GridFromJson(const json& j) {
  pmice::GridConfig g;
  g.step_fraction = j.at("step_fraction").get<double>();
  g.max_fraction = j.at("max_fraction").get<double>();
  g.percentile_clip = j.at("percentile_clip").get<double>();
  return g;
}

json ProjectionToJson(const pmice::ProjectionConfig& p) {
  return {{"k", p.k},
          {"weights", pmice::ToString(p.weights)},
          {"pool_label", pmice::ToString(p.pool_label)},
          {"stratify_discrete", p.stratify_discrete}};
}

pmice::ProjectionConfig ProjectionFromJson(const json& j) {
  pmice::ProjectionConfig p;
  p.k = j.at("k").get<int>();
  p.weights = pmice::ParseWeightScheme(j.at("weights").get<std::string>());
  p.pool_label = pmice::ParsePoolLabel(j.at("pool_label").get<std::string>());
  p.stratify_discrete = j.at("stratify_discrete").get<bool>();
  return p;
}

std::vector<std::size_t> Rows(const cohort::PreparedDataset& data, cohort::Split which) {
  return data.RowsIn(which);
}

template <typename T>
std::vector<T> Pick(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (const std::size_t i : idx) out.push_back(v[i]);
  return out;
}

cohort::LabeledDataset DatasetFor(const cohort::Cohort& cohort, const cohort::DiseaseRule& rule,
                                  int horizon, double fraction, std::uint64_t split_seed) {
  const auto labels = cohort::LabelDisease(cohort, rule);
  auto dataset = cohort::BuildHorizonDataset(cohort, labels, horizon, rule.disease);
  cohort::AssignSplit(cohort, dataset, fraction, split_seed);
  return dataset;
}

}  // namespace

json TrainOptions::ToJson() const {
  return {{"horizon_years", horizon_years},
          {"train_fraction", train_fraction},
          {"split_seed", split_seed},
          {"seed", seed},
          {"train", TrainConfigToJson(train)},
          {"rfe_target", rfe_target},
          {"rfe_step", rfe_step},
          {"folds", folds},
          {"max_missing_fraction", preprocess.max_missing_fraction},
          {"grid", GridToJson(grid)},
          {"projection", ProjectionToJson(projection)}};
}

json DiseaseModel::ToJson() const {
  json rfe = json::array();
  for (const auto& s : rfe_trace) {
    rfe.push_back({{"n_features", s.n_features},
                   {"cv_auc", std::isnan(s.cv_auc) ? json(nullptr) : json(s.cv_auc)},
                   {"removed", s.removed}});
  }
  json k = json::array();
  for (const auto& s : k_table) {
    k.push_back({{"k", s.k}, {"mean", s.mean}, {"sd", s.sd}, {"score", s.score},
                 {"records", s.records}});
  }
  return {{"format", "hdpd-disease-model"},
          {"version", kDiseaseModelVersion},
          {"disease", disease},
          {"horizon_years", horizon_years},
          {"train_fraction", train_fraction},
          {"split_seed", split_seed},
          {"seed", seed},
          {"max_missing_fraction", preprocess.max_missing_fraction},
          {"preprocessor", preprocessor.ToJson()},
          {"model_columns", model_columns},
          {"model", predictor::FittedModelToJson(model)},
          {"train", TrainConfigToJson(train)},
          {"fold_thresholds", fold_thresholds},
          {"rfe_trace", rfe},
          {"grid", GridToJson(grid)},
          {"projection", ProjectionToJson(projection)},
          {"k_table", k},
          {"test_auc", test_auc ? json(*test_auc) : json(nullptr)},
          {"test_confusion",
           {{"tp", test_confusion.tp}, {"fn", test_confusion.fn},
            {"fp", test_confusion.fp}, {"tn", test_confusion.tn}}}};
}

DiseaseModel DiseaseModel::FromJson(const json& j) {
  if (!j.is_object() || j.value("format", "") != "hdpd-disease-model") {
    throw ParseError("not a disease model file");
  }
  const int version = j.value("version", -1);
  if (version != kDiseaseModelVersion) {
    throw VersionMismatch("disease model version " + std::to_string(version) +
                          " is not supported (expected " + std::to_string(kDiseaseModelVersion) +
                          "); retrain with `train`");
  }
  DiseaseModel m;
  try {
    m.disease = j.at("disease").get<std::string>();
    m.horizon_years = j.at("horizon_years").get<int>();
    m.train_fraction = j.at("train_fraction").get<double>();
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.preprocess.max_missing_fraction = j.at("max_missing_fraction").get<double>();
    m.preprocessor = cohort::Preprocessor::FromJson(j.at("preprocessor"));
    m.model_columns = j.at("model_columns").get<std::vector<std::size_t>>();
    m.model = predictor::FittedModelFromJson(j.at("model"));
    m.train = TrainConfigFromJson(j.at("train"));
    m.fold_thresholds = j.at("fold_thresholds").get<std::vector<double>>();
    for (const auto& s : j.at("rfe_trace")) {
      predictor::RfeStep step;
      step.n_features = s.at("n_features").get<std::size_t>();
      step.cv_auc = s.at("cv_auc").is_null() ? std::nan("") : s.at("cv_auc").get<double>();
      step.removed = s.at("removed").get<std::vector<std::string>>();
      m.rfe_trace.push_back(std::move(step));
    }
    m.grid = GridFromJson(j.at("grid"));
    m.projection = ProjectionFromJson(j.at("projection"));
    for (const auto& s : j.at("k_table")) {
      m.k_table.push_back({s.at("k").get<int>(), s.at("mean").get<double>(),
                           s.at("sd").get<double>(), s.at("score").get<double>(),
                           s.at("records").get<std::size_t>()});
    }
    if (!j.at("test_auc").is_null()) m.test_auc = j.at("test_auc").get<double>();
    const auto& c = j.at("test_confusion");
    m.test_confusion = {c.at("tp").get<long>(), c.at("fn").get<long>(), c.at("fp").get<long>(),
                        c.at("tn").get<long>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("disease model file: ") + e.what());
  }
  const auto& columns = m.preprocessor.columns();
  if (m.model_columns.size() != m.model.features().size()) {
    throw ParseError("disease model columns do not match the fitted model");
  }
  for (std::size_t i = 0; i < m.model_columns.size(); ++i) {
    if (m.model_columns[i] >= columns.size() ||
        columns[m.model_columns[i]].name != m.model.features()[i]) {
      throw ParseError("disease model column '" + m.model.features()[i] +
                       "' is not produced by its preprocessor");
    }
  }
  return m;
}

DiseaseModel TrainDiseaseModel(const cohort::Cohort& cohort, const cohort::DiseaseRule& rule,
                               const TrainOptions& options) {
  options.train.Validate();
  options.grid.Validate();
  options.projection.Validate();
  const auto dataset = DatasetFor(cohort, rule, options.horizon_years, options.train_fraction,
                                  options.split_seed);
  const auto data = cohort::Preprocess(cohort, dataset, options.preprocess);
  const auto train_rows = Rows(data, cohort::Split::kTrain);
  if (train_rows.empty()) throw ComputationError("no training rows for " + rule.disease);

  const Matrix x_all = data.values.SelectRows(train_rows);
  const auto y = Pick(data.labels, train_rows);
  const auto participants = Pick(data.participants, train_rows);
  std::vector<std::string> names;
  for (const auto& c : data.preprocessor.columns()) names.push_back(c.name);

  DiseaseModel m;
  m.disease = rule.disease;
  m.horizon_years = options.horizon_years;
  m.train_fraction = options.train_fraction;
  m.split_seed = options.split_seed;
  m.seed = options.seed;
  m.preprocess = options.preprocess;
  m.preprocessor = data.preprocessor;
  m.train = options.train;
  m.grid = options.grid;
  m.projection = options.projection;

  std::vector<std::size_t> selected(names.size());
  for (std::size_t i = 0; i < selected.size(); ++i) selected[i] = i;
  if (options.rfe_target > 0 && names.size() > options.rfe_target) {
    Log().info("{}: eliminating {} -> {} features", rule.disease, names.size(),
               options.rfe_target);
    auto rfe = predictor::Rfe(x_all, y, participants, names, options.train, options.rfe_target,
                              options.folds, options.seed, options.rfe_step);
    if (rfe.aborted) throw ComputationError("feature elimination aborted for " + rule.disease);
    selected = rfe.selected;
    m.rfe_trace = std::move(rfe.trace);
  }
  m.model_columns = selected;
  const Matrix x = x_all.SelectCols(selected);
  const auto selected_names = Pick(names, selected);

  const auto threshold = predictor::SelectThresholdCv(x, y, participants, options.train,
                                                      options.folds, options.seed);
  m.fold_thresholds = threshold.fold_thresholds;
  m.model.ensemble = predictor::TrainGbdt(x, y, options.train, selected_names);
  m.model.threshold = threshold.threshold;
  const auto importance = m.model.ensemble.FeatureImportance();
  for (std::size_t i = 0; i < selected_names.size(); ++i) {
    m.model.importances[selected_names[i]] = importance[i];
  }

  const auto test_rows = Rows(data, cohort::Split::kTest);
  if (!test_rows.empty()) {
    const Matrix x_test = data.values.SelectRows(test_rows).SelectCols(selected);
    const auto y_test = Pick(data.labels, test_rows);
    std::vector<double> scores(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) scores[i] = m.model.Predict(x_test.Row(i));
    m.test_confusion = predictor::Confusion(scores, y_test, m.model.threshold);
    const bool both = std::count(y_test.begin(), y_test.end(), 1) > 0 &&
                      std::count(y_test.begin(), y_test.end(), 0) > 0;
    if (both) m.test_auc = predictor::Auc(scores, y_test);
  }
  Log().info("{}: {} features, threshold {:.4f}, test AUC {}", rule.disease, selected.size(),
             m.model.threshold, m.test_auc ? std::to_string(*m.test_auc) : "n/a");
  return m;
}

cohort::PreparedDataset PrepareFor(const cohort::Cohort& cohort, const cohort::DiseaseRule& rule,
                                   const DiseaseModel& model) {
  if (rule.disease != model.disease) {
    throw InvalidArgument("rule '" + rule.disease + "' does not match model '" + model.disease +
                          "'");
  }
  const auto dataset =
      DatasetFor(cohort, rule, model.horizon_years, model.train_fraction, model.split_seed);
  return cohort::Preprocess(cohort, dataset, model.preprocessor);
}

DiseaseSession::DiseaseSession(const cohort::Cohort& cohort, cohort::DiseaseRule rule,
                               DiseaseModel model)
    : cohort_(cohort), rule_(std::move(rule)), model_(std::move(model)) {
  data_ = PrepareFor(cohort_, rule_, model_);
  const auto& columns = model_.preprocessor.columns();
  const std::size_t m = model_.model_columns.size();

  const auto train_rows = data_.RowsIn(cohort::Split::kTrain);
  reference_.values = data_.values.SelectRows(train_rows).SelectCols(model_.model_columns);
  reference_.labels = Pick(data_.labels, train_rows);
  reference_.participants = Pick(data_.participants, train_rows);
  reference_.years = Pick(data_.years, train_rows);

  // Domains over every record of the training participants, so that all
  // diseases sharing a split also share their axes.
  std::map<std::string, cohort::Split> split;
  {
    const auto dataset = DatasetFor(cohort_, rule_, model_.horizon_years, model_.train_fraction,
                                    model_.split_seed);
    split = dataset.split;
  }
  space_.discrete.resize(m);
  for (std::size_t i = 0; i < m; ++i) space_.discrete[i] = columns[model_.model_columns[i]].discrete();
  Matrix observed(0, m);
  std::vector<double> row(m);
  for (const auto& record : cohort_.records()) {
    const auto it = split.find(record.participant_id);
    if (it == split.end() || it->second != cohort::Split::kTrain) continue;
    const auto t = model_.preprocessor.Transform(record);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t c = model_.model_columns[i];
      row[i] = t.missing[c] ? kMissing : t.values[c];
    }
    observed.AppendRow(row);
  }
  space_.domains = pmice::ComputeDomains(observed, space_.discrete, model_.grid.percentile_clip);
}

std::optional<std::size_t> DiseaseSession::FeatureIndex(std::string_view name) const {
  const auto& f = features();
  const auto it = std::find(f.begin(), f.end(), name);
  if (it == f.end()) return std::nullopt;
  return static_cast<std::size_t>(it - f.begin());
}

diagram::DiagramContext DiseaseSession::Context() const {
  diagram::DiagramContext ctx;
  ctx.model = &model_.model;
  ctx.reference = &reference_;
  ctx.space = &space_;
  ctx.grid = model_.grid;
  ctx.projection = model_.projection;
  ctx.disease = model_.disease;
  return ctx;
}

diagram::RecordView DiseaseSession::View(std::size_t record_index) const {
  const auto& record = cohort_.records().at(record_index);
  const auto t = model_.preprocessor.Transform(record);
  diagram::RecordView v;
  v.id = record.Id();
  v.participant = record.participant_id;
  v.year = record.year;
  for (const std::size_t c : model_.model_columns) {
    v.values.push_back(t.values[c]);
    v.missing.push_back(t.missing[c]);
  }
  return v;
}

std::vector<eval::FuturePoint> DiseaseSession::Futures(std::size_t record_index) const {
  std::vector<eval::FuturePoint> out;
  for (const std::size_t f : cohort::FutureRecords(cohort_, record_index, model_.horizon_years)) {
    const auto& record = cohort_.records()[f];
    const auto t = model_.preprocessor.Transform(record);
    eval::FuturePoint p;
    p.year = record.year;
    for (const std::size_t c : model_.model_columns) {
      p.values.push_back(t.missing[c] ? kMissing : t.values[c]);
    }
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const eval::FuturePoint& a, const eval::FuturePoint& b) { return a.year < b.year; });
  return out;
}

double DiseaseSession::Score(std::size_t record_index) const {
  return model_.model.Predict(View(record_index).values);
}

std::vector<eval::TuningRecord> DiseaseSession::TuningRecords() const {
  std::vector<eval::TuningRecord> out;
  for (const std::size_t r : data_.RowsIn(cohort::Split::kTrain)) {
    const std::size_t idx = data_.record_index[r];
    auto view = View(idx);
    if (!model_.model.PredictOnset(view.values)) continue;
    auto futures = Futures(idx);
    if (futures.empty()) continue;
    out.push_back({std::move(view), std::move(futures)});
  }
  return out;
}

std::vector<eval::EvalRecord> DiseaseSession::TestRecords() const {
  std::vector<eval::EvalRecord> out;
  for (const std::size_t r : data_.RowsIn(cohort::Split::kTest)) {
    const std::size_t idx = data_.record_index[r];
    eval::EvalRecord e;
    e.view = View(idx);
    e.score = model_.model.Predict(e.view.values);
    e.label = data_.labels[r];
    e.futures = Futures(idx);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::size_t> DiseaseSession::PredictedOnsetTest() const {
  std::vector<std::pair<std::string, std::size_t>> hits;
  for (const std::size_t r : data_.RowsIn(cohort::Split::kTest)) {
    const std::size_t idx = data_.record_index[r];
    if (model_.model.PredictOnset(View(idx).values)) hits.emplace_back(cohort_.records()[idx].Id(), idx);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::size_t> out;
  for (const auto& [id, idx] : hits) out.push_back(idx);
  return out;
}

eval::TuneKResult DiseaseSession::TuneK(std::span<const int> k_grid,
                                        std::size_t max_records) const {
  auto records = TuningRecords();
  std::sort(records.begin(), records.end(),
            [](const eval::TuningRecord& a, const eval::TuningRecord& b) {
              return a.view.id < b.view.id;
            });
  if (max_records > 0 && records.size() > max_records) {
    std::vector<eval::TuningRecord> thinned;
    const double step = static_cast<double>(records.size()) / static_cast<double>(max_records);
    for (std::size_t i = 0; i < max_records; ++i) {
      thinned.push_back(records[static_cast<std::size_t>(static_cast<double>(i) * step)]);
    }
    records = std::move(thinned);
  }
  return eval::TuneK(Context(), records, k_grid);
}

eval::DiseaseEvaluation DiseaseSession::Evaluate(const eval::EvaluationOptions& options,
                                                 const eval::ProgressFn& progress) const {
  const auto test = TestRecords();
  const auto tuning = options.tune_k ? TuningRecords() : std::vector<eval::TuningRecord>{};
  auto ev = eval::Evaluate(Context(), test, tuning, options, progress);
  ev.horizon_years = model_.horizon_years;
  ev.test_auc = model_.test_auc;
  return ev;
}

diagram::ContributionMatrix ContributionAnalysis(const DiseaseSession& session,
                                                 std::span<const std::size_t> records,
                                                 diagram::DiagramMode mode,
                                                 std::vector<diagram::Diagram>* diagrams) {
  diagram::ContributionMatrix m;
  m.features = session.features();
  m.values = Matrix(0, m.features.size());
  const auto ctx = session.Context();
  for (const std::size_t idx : records) {
    const auto view = session.View(idx);
    auto batch = diagram::BatchDiagrams(ctx, view, mode);
    m.records.push_back(view.id);
    m.values.AppendRow(diagram::FeatureContribution(batch, m.features.size()));
    if (diagrams) {
      for (auto& d : batch) diagrams->push_back(std::move(d));
    }
  }
  return m;
}

}  // namespace hdpd::interface
