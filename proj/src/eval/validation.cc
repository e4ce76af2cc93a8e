#include "hdpd/eval/validation.h"

#include <algorithm>
#include <cmath>

#include "hdpd/common/error.h"
#include "hdpd/eval/statistics.h"
#include "hdpd/pmice/projector.h"

namespace hdpd::eval {

std::string_view ToString(Outcome outcome) {
  return outcome == Outcome::kActualOnset ? "actual-onset" : "prevented-onset";
}

std::vector<PredictedOnset> CategorizePredictions(std::span<const double> scores,
                                                  std::span<const int> labels, double tau) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  std::vector<PredictedOnset> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= tau)) continue;
    out.push_back({i, scores[i], labels[i] == 1 ? Outcome::kActualOnset : Outcome::kPreventedOnset});
  }
  return out;
}

std::optional<std::size_t> NearestAxisIndex(std::span<const double> axis, double v) {
  if (axis.empty() || std::isnan(v) || v < axis.front() || v > axis.back()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (std::abs(axis[i] - v) < std::abs(axis[best] - v)) best = i;
  }
  return best;
}

std::optional<double> ImprovedHdpdProportion(std::span<const diagram::Diagram> diagrams,
                                             std::span<const FuturePoint> futures) {
  std::size_t eligible = 0;
  std::size_t improved = 0;
  for (const auto& d : diagrams) {
    if (diagram::IsNoBoundary(d.pattern)) continue;
    bool mappable = false;
    bool hit = false;
    for (const auto& f : futures) {
      const auto ix = NearestAxisIndex(d.axis_x, f.values.at(d.fx));
      const auto iy = NearestAxisIndex(d.axis_y, f.values.at(d.fy));
      if (!ix || !iy) continue;
      mappable = true;
      if (d.LabelAt(*ix, *iy) == 0) hit = true;
    }
    if (!mappable) continue;
    ++eligible;
    if (hit) ++improved;
  }
  if (eligible == 0) return std::nullopt;
  return static_cast<double>(improved) / static_cast<double>(eligible);
}

double ApproachedValue(std::span<const double> ice_point, std::span<const double> projected,
                       std::span<const double> future, const pmice::FeatureSpace& space) {
  return pmice::NormalizedDistance(ice_point, future, space) -
         pmice::NormalizedDistance(projected, future, space);
}

std::vector<std::optional<ApproachedResult>> ApproachedDistances(
    const diagram::DiagramContext& context, const diagram::RecordView& record,
    std::span<const FuturePoint> futures, std::span<const int> ks) {
  context.Validate();
  const auto& space = *context.space;
  const auto& model = *context.model;
  const std::vector<bool> excluded = context.exclude_future
                                         ? pmice::FutureExclusion(*context.reference,
                                                                  record.participant, record.year)
                                         : std::vector<bool>{};
  const int original_label = model.PredictOnset(record.values) ? 1 : 0;

  std::vector<double> sum(ks.size(), 0.0), sum_ice(ks.size(), 0.0), sum_proj(ks.size(), 0.0);
  std::size_t pairs = 0;
  for (const auto& [fx, fy] : diagram::MeasuredPairs(record)) {
    const FuturePoint* target = nullptr;
    for (const auto& f : futures) {
      if (!std::isnan(f.values.at(fx)) && !std::isnan(f.values.at(fy))) {
        target = &f;
        break;
      }
    }
    if (target == nullptr) continue;
    std::vector<double> ice = record.values;
    ice[fx] = target->values[fx];
    ice[fy] = target->values[fy];
    const int label = context.projection.pool_label == pmice::PoolLabel::kPerturbedPoint
                          ? (model.PredictOnset(ice) ? 1 : 0)
                          : original_label;
    const pmice::PairProjector projector(*context.reference, space, record.values, fx, fy,
                                         excluded);
    const auto lists = projector.NeighborsMulti(ice[fx], ice[fy], label, ks,
                                                context.projection.stratify_discrete);
    const double d_ice = pmice::NormalizedDistance(ice, target->values, space);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto projected =
          projector.ProjectWith(ice[fx], ice[fy], lists[i], context.projection.weights);
      const double d_proj = pmice::NormalizedDistance(projected, target->values, space);
      sum[i] += d_ice - d_proj;
      sum_ice[i] += d_ice;
      sum_proj[i] += d_proj;
    }
    ++pairs;
  }
  std::vector<std::optional<ApproachedResult>> out(ks.size());
  if (pairs == 0) return out;
  const auto n = static_cast<double>(pairs);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out[i] = ApproachedResult{sum[i] / n, sum_ice[i] / n, sum_proj[i] / n, pairs};
  }
  return out;
}

std::optional<ApproachedResult> ApproachedDistance(const diagram::DiagramContext& context,
                                                   const diagram::RecordView& record,
                                                   std::span<const FuturePoint> futures) {
  const int ks[] = {context.projection.k};
  return ApproachedDistances(context, record, futures, ks).front();
}

std::vector<int> DefaultKGrid() {
  return {1, 2, 4, 6, 8, 10, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64};
}

KScore ScoreK(int k, std::span<const double> values) {
  KScore s;
  s.k = k;
  s.records = values.size();
  if (values.empty()) throw InvalidArgument("no approached distances to score");
  // Sorted so the result does not depend on record order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean = Mean(sorted);
  s.sd = SampleSd(sorted);
  s.score = s.sd > 0.0 ? s.mean / s.sd : s.mean;
  return s;
}

std::size_t ArgmaxK(std::span<const int> ks, std::span<const double> scores) {
  if (ks.empty() || ks.size() != scores.size()) throw InvalidArgument("k grid and scores differ");
  std::size_t best = 0;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && ks[i] < ks[best])) best = i;
  }
  return best;
}

TuneKResult TuneK(const diagram::DiagramContext& context, std::span<const TuningRecord> records,
                  std::span<const int> k_grid) {
  if (k_grid.empty()) throw InvalidArgument("empty k grid");
  std::vector<std::vector<double>> values(k_grid.size());
  for (const auto& r : records) {
    const auto results = ApproachedDistances(context, r.view, r.futures, k_grid);
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
      if (results[i]) values[i].push_back(results[i]->mean);
    }
  }
  if (values.front().empty()) throw InvalidArgument("no record has an eligible future point");
  TuneKResult out;
  std::vector<double> scores;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    out.table.push_back(ScoreK(k_grid[i], values[i]));
    scores.push_back(out.table.back().score);
  }
  out.k = k_grid[ArgmaxK(k_grid, scores)];
  return out;
}

}  // namespace hdpd::eval
