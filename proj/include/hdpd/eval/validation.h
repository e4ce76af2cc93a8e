#ifndef HDPD_EVAL_VALIDATION_H_
#define HDPD_EVAL_VALIDATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hdpd/diagram/builder.h"
#include "hdpd/diagram/diagram.h"

namespace hdpd::eval {

enum class Outcome { kActualOnset, kPreventedOnset };

std::string_view ToString(Outcome outcome);

struct PredictedOnset {
  std::size_t index = 0;  // position in the scored inputs
  double score = 0.0;
  Outcome outcome = Outcome::kActualOnset;
};

// Rows scoring at least tau, split by their future label (1 = actual onset,
// 0 = prevented onset). Rows below tau are dropped.
std::vector<PredictedOnset> CategorizePredictions(std::span<const double> scores,
                                                  std::span<const int> labels, double tau);

// A later measurement of the same participant in model-feature space.
// Unmeasured values are NaN.
struct FuturePoint {
  int year = 0;
  std::vector<double> values;
};

// Axis index closest to v; empty when v lies outside [front, back]. Equal
// distances go to the lower index.
std::optional<std::size_t> NearestAxisIndex(std::span<const double> axis, double v);

// Share of boundary-forming diagrams in which some future (x, y) lands on a
// non-onset cell. Diagrams without a boundary or without any mappable future
// point are left out; empty when nothing remains.
std::optional<double> ImprovedHdpdProportion(std::span<const diagram::Diagram> diagrams,
                                             std::span<const FuturePoint> futures);

// d(ice, future) - d(projected, future) over the future's measured features.
double ApproachedValue(std::span<const double> ice_point, std::span<const double> projected,
                       std::span<const double> future, const pmice::FeatureSpace& space);

struct ApproachedResult {
  double mean = 0.0;          // mean approached value over pairs
  double mean_ice = 0.0;      // mean d(ice, future)
  double mean_projected = 0.0;
  std::size_t pairs = 0;
};

// Approached distance for several k in one pass. For every measured pair the
// earliest future point (futures must be sorted by year) measuring both
// variables supplies the intervention values and the target. Entries are
// empty when no pair has such a future point.
std::vector<std::optional<ApproachedResult>> ApproachedDistances(
    const diagram::DiagramContext& context, const diagram::RecordView& record,
    std::span<const FuturePoint> futures, std::span<const int> ks);

std::optional<ApproachedResult> ApproachedDistance(const diagram::DiagramContext& context,
                                                   const diagram::RecordView& record,
                                                   std::span<const FuturePoint> futures);

std::vector<int> DefaultKGrid();

struct KScore {
  int k = 0;
  double mean = 0.0;
  double sd = 0.0;
  double score = 0.0;  // mean / sd, or mean when sd is 0
  std::size_t records = 0;
};

struct TuneKResult {
  int k = 0;
  std::vector<KScore> table;
};

// Objective for one k: mean / sample sd, falling back to the mean when the
// spread is zero or there is a single value.
KScore ScoreK(int k, std::span<const double> values);

// Index of the largest score; ties go to the smaller k. Throws InvalidArgument
// on empty or mismatched input.
std::size_t ArgmaxK(std::span<const int> ks, std::span<const double> scores);

// Per k in the grid, scores the per-record approached distances; records with
// no eligible future point are skipped. Throws InvalidArgument when no record
// yields a value.
struct TuningRecord {
  diagram::RecordView view;
  std::vector<FuturePoint> futures;
};
TuneKResult TuneK(const diagram::DiagramContext& context, std::span<const TuningRecord> records,
                  std::span<const int> k_grid);

}  // namespace hdpd::eval

#endif  // HDPD_EVAL_VALIDATION_H_
