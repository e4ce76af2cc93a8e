#include "hdpd/eval/report.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"
#include "hdpd/diagram/analytics.h"

namespace hdpd::eval {
namespace {

void Summarize(GroupSummary& g) {
  if (g.proportions.empty()) return;
  g.median = Median(g.proportions);
  std::vector<double> sorted = g.proportions;
  std::sort(sorted.begin(), sorted.end());
  g.mean = Mean(sorted);
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string PValue(double p) { return p < 0.001 ? "<0.001" : Fixed(p, 3); }

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

DiseaseEvaluation Evaluate(diagram::DiagramContext context, std::span<const EvalRecord> test,
                           std::span<const TuningRecord> tuning, const EvaluationOptions& options,
                           const ProgressFn& progress) {
  context.Validate();
  DiseaseEvaluation ev;
  ev.disease = context.disease;
  ev.threshold = context.model->threshold;

  if (options.tune_k) {
    std::vector<const TuningRecord*> chosen;
    for (const auto& r : tuning) chosen.push_back(&r);
    std::sort(chosen.begin(), chosen.end(),
              [](const TuningRecord* a, const TuningRecord* b) { return a->view.id < b->view.id; });
    if (options.max_tuning_records > 0 && chosen.size() > options.max_tuning_records) {
      // Evenly spaced over the id order.
      std::vector<const TuningRecord*> thinned;
      const double step = static_cast<double>(chosen.size()) /
                          static_cast<double>(options.max_tuning_records);
      for (std::size_t i = 0; i < options.max_tuning_records; ++i) {
        thinned.push_back(chosen[static_cast<std::size_t>(static_cast<double>(i) * step)]);
      }
      chosen = std::move(thinned);
    }
    std::vector<TuningRecord> subset;
    subset.reserve(chosen.size());
    for (const auto* r : chosen) subset.push_back(*r);
    const TuneKResult tuned = TuneK(context, subset, options.k_grid);
    context.projection.k = tuned.k;
    ev.k_table = tuned.table;
  }
  ev.k = context.projection.k;

  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& r : test) {
    scores.push_back(r.score);
    labels.push_back(r.label);
  }
  const auto onset = CategorizePredictions(scores, labels, context.model->threshold);
  std::vector<std::size_t> order(onset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return test[onset[a].index].view.id < test[onset[b].index].view.id;
  });

  std::vector<double> d_ice;
  std::vector<double> d_proj;
  std::vector<double> approached;
  std::size_t done = 0;
  for (const std::size_t o : order) {
    const auto& p = onset[o];
    const EvalRecord& r = test[p.index];
    RecordDetail detail;
    detail.record_id = r.view.id;
    detail.outcome = p.outcome;
    detail.score = p.score;
    const auto diagrams = diagram::BatchDiagrams(context, r.view, options.mode);
    detail.diagrams = diagrams.size();
    detail.improved = ImprovedHdpdProportion(diagrams, r.futures);
    detail.bivariate = diagram::BivariateProportion(diagrams);
    detail.approached = ApproachedDistance(context, r.view, r.futures);

    GroupSummary& group = p.outcome == Outcome::kPreventedOnset ? ev.prevented : ev.actual;
    ++group.records;
    if (detail.improved) {
      group.record_ids.push_back(detail.record_id);
      group.proportions.push_back(*detail.improved);
    }
    if (detail.approached) {
      d_ice.push_back(detail.approached->mean_ice);
      d_proj.push_back(detail.approached->mean_projected);
      approached.push_back(detail.approached->mean);
    }
    ev.records.push_back(std::move(detail));
    if (progress) progress(++done, order.size());
  }
  Summarize(ev.prevented);
  Summarize(ev.actual);
  if (!ev.prevented.proportions.empty() && !ev.actual.proportions.empty()) {
    ev.improved_test = WilcoxonRankSum(ev.prevented.proportions, ev.actual.proportions);
  } else {
    Log().warn("{}: an outcome group has no defined improved-HDPD proportion", ev.disease);
  }
  ev.approached_records = approached.size();
  if (!approached.empty()) {
    ev.approached_mean = Mean(approached);
    ev.approached_sd = SampleSd(approached);
  }
  if (approached.size() >= 2) ev.approached_test = PairedT(d_ice, d_proj);
  return ev;
}

nlohmann::json EvaluationToJson(const DiseaseEvaluation& ev) {
  auto group = [](const GroupSummary& g) {
    return nlohmann::json{{"records", g.records},
                          {"defined", g.proportions.size()},
                          {"median", g.median},
                          {"mean", g.mean},
                          {"record_ids", g.record_ids},
                          {"proportions", g.proportions}};
  };
  nlohmann::json k_table = nlohmann::json::array();
  for (const auto& s : ev.k_table) {
    k_table.push_back(
        {{"k", s.k}, {"mean", s.mean}, {"sd", s.sd}, {"score", s.score}, {"records", s.records}});
  }
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : ev.records) {
    nlohmann::json a = nullptr;
    if (r.approached) {
      a = {{"mean", r.approached->mean},
           {"d_ice", r.approached->mean_ice},
           {"d_projected", r.approached->mean_projected},
           {"pairs", r.approached->pairs}};
    }
    records.push_back({{"record_id", r.record_id},
                       {"outcome", ToString(r.outcome)},
                       {"score", r.score},
                       {"diagrams", r.diagrams},
                       {"improved_proportion", OptionalJson(r.improved)},
                       {"bivariate_proportion", OptionalJson(r.bivariate)},
                       {"approached", a}});
  }
  nlohmann::json j = {{"disease", ev.disease},
                      {"horizon_years", ev.horizon_years},
                      {"threshold", ev.threshold},
                      {"test_auc", OptionalJson(ev.test_auc)},
                      {"k", ev.k},
                      {"k_table", k_table},
                      {"prevented_onset", group(ev.prevented)},
                      {"actual_onset", group(ev.actual)},
                      {"approached_distance",
                       {{"records", ev.approached_records},
                        {"mean", ev.approached_mean},
                        {"sd", ev.approached_sd}}},
                      {"records", records}};
  if (ev.improved_test) {
    j["improved_test"] = {{"statistic", ev.improved_test->statistic},
                          {"p", ev.improved_test->p},
                          {"exact", ev.improved_test->exact}};
  }
  if (ev.approached_test) {
    j["approached_test"] = {{"t", ev.approached_test->t},
                            {"df", ev.approached_test->df},
                            {"p", ev.approached_test->p},
                            {"degenerate", ev.approached_test->degenerate}};
  }
  return j;
}

std::string ApproachedTable(std::span<const DiseaseEvaluation> evaluations) {
  std::ostringstream out;
  out << "disease\tapproached_distance\tp\tk\trecords\n";
  for (const auto& ev : evaluations) {
    out << ev.disease << '\t' << Fixed(ev.approached_mean, 3) << " +- "
        << Fixed(ev.approached_sd, 3) << '\t'
        << (ev.approached_test ? PValue(ev.approached_test->p) : "NA") << '\t' << ev.k << '\t'
        << ev.approached_records << '\n';
  }
  return out.str();
}

std::string GroupTable(std::span<const DiseaseEvaluation> evaluations) {
  std::ostringstream out;
  out << "disease\tprevented_median\tprevented_n\tactual_median\tactual_n\tp\n";
  for (const auto& ev : evaluations) {
    out << ev.disease << '\t' << Fixed(ev.prevented.median, 3) << '\t'
        << ev.prevented.proportions.size() << '\t' << Fixed(ev.actual.median, 3) << '\t'
        << ev.actual.proportions.size() << '\t'
        << (ev.improved_test ? PValue(ev.improved_test->p) : "NA") << '\n';
  }
  return out.str();
}

}  // namespace hdpd::eval
