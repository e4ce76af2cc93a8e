#ifndef HDPD_DIAGRAM_ANALYTICS_H_
#define HDPD_DIAGRAM_ANALYTICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/common/matrix.h"
#include "hdpd/diagram/diagram.h"

namespace hdpd::diagram {

// Per feature (indexed like the model features): share of the diagrams that
// include the feature in which it forms the boundary (both variables for a
// bivariate boundary, the matching axis for a univariate one). Features in
// no diagram score 0.
std::vector<double> FeatureContribution(std::span<const Diagram> diagrams,
                                        std::size_t n_features);

struct ContributionMatrix {
  std::vector<std::string> records;
  std::vector<std::string> features;
  Matrix values;  // records x features, entries in [0, 1]
};

// #bivariate / (#bivariate + #univariate); empty when no diagram has a
// boundary.
std::optional<double> BivariateProportion(std::span<const Diagram> diagrams);

enum class PrimaryAxis { kX, kY };

struct LimitValues {
  std::vector<double> limits;  // one per level of the other axis
  double min = 0.0;
  double max = 0.0;
};

// Boundary value of the primary variable for every level of the secondary
// one. Low-is-risk: the largest primary value labelled onset, or the axis
// minimum when the level has no onset. High-is-risk mirrors this. Throws
// InvalidArgument when no risk direction is given.
LimitValues ExtractLimits(const Diagram& diagram, PrimaryAxis primary,
                          std::optional<cohort::RiskDirection> direction);

// Onset diseases per cell across diagrams of one record and pair.
struct SuperimposedGrid {
  std::string record_id;
  std::string var_x;
  std::string var_y;
  std::vector<double> axis_x;
  std::vector<double> axis_y;
  std::vector<std::vector<std::string>> cells;  // sorted disease names

  std::size_t FreeCells() const;
};

// Throws InvalidArgument when the diagrams differ in record, variables or
// axis values, or when the list is empty.
SuperimposedGrid Superimpose(std::span<const Diagram> diagrams);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_ANALYTICS_H_
