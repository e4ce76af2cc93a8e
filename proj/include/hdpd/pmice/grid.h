#ifndef HDPD_PMICE_GRID_H_
#define HDPD_PMICE_GRID_H_

#include <span>
#include <utility>
#include <vector>

#include "hdpd/pmice/domain.h"
#include "hdpd/predictor/tree_ensemble.h"

namespace hdpd::pmice {

struct GridConfig {
  double step_fraction = 0.04;
  double max_fraction = 0.40;
  double percentile_clip = 0.005;

  // Offsets per direction (10 by default).
  int Steps() const;
  void Validate() const;
};

// Strictly increasing axis values with the position of the original value.
struct Axis {
  std::vector<double> values;
  std::size_t origin = 0;

  std::size_t size() const { return values.size(); }
};

// Continuous: {v0 + i * step_fraction * width : |i| <= Steps()} restricted to
// [lo, hi], always keeping v0 itself. Discrete: {0, 1}. A zero-width domain
// yields {v0}.
Axis BuildAxis(double v0, const FeatureDomain& domain, bool discrete,
               const GridConfig& config = {});

// Two-variable perturbation grid; cells are row-major with x varying fastest
// (cell = iy * nx + ix).
struct PerturbationGrid {
  std::size_t fx = 0;
  std::size_t fy = 0;
  Axis x;
  Axis y;

  std::size_t nx() const { return x.size(); }
  std::size_t ny() const { return y.size(); }
  std::size_t cells() const { return nx() * ny(); }
  std::size_t OriginCell() const { return y.origin * nx() + x.origin; }
};

// Throws InvalidArgument when fx == fy or either index is out of range.
PerturbationGrid MakeGrid(std::span<const double> record, std::size_t fx, std::size_t fy,
                          std::span<const FeatureDomain> domains,
                          const std::vector<bool>& discrete, const GridConfig& config = {});

// 2d-ICE points: copies of `record` with (fx, fy) set to each cell's values.
std::vector<std::vector<double>> Perturb2d(std::span<const double> record,
                                           const PerturbationGrid& grid);

// Classical one-variable ICE: probability along `axis` with every other
// variable fixed at the record's value.
std::vector<std::pair<double, double>> IceCurve(const predictor::TreeEnsemble& model,
                                                std::span<const double> record,
                                                std::size_t feature, const Axis& axis);

}  // namespace hdpd::pmice

#endif  // HDPD_PMICE_GRID_H_
