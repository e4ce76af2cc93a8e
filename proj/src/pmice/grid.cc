#include "hdpd/pmice/grid.h"

#include <algorithm>
#include <cmath>

#include "hdpd/common/error.h"

namespace hdpd::pmice {

int GridConfig::Steps() const {
  return static_cast<int>(std::lround(max_fraction / step_fraction));
}

void GridConfig::Validate() const {
  if (!(step_fraction > 0.0) || !(max_fraction >= step_fraction)) {
    throw InvalidArgument("grid needs 0 < step_fraction <= max_fraction");
  }
  const double ratio = max_fraction / step_fraction;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw InvalidArgument("grid step must divide the maximum offset");
  }
  if (!(percentile_clip >= 0.0 && percentile_clip < 0.5)) {
    throw InvalidArgument("percentile clip must lie in [0, 0.5)");
  }
}

Axis BuildAxis(double v0, const FeatureDomain& domain, bool discrete,
               const GridConfig& config) {
  if (IsMissing(v0)) throw InvalidArgument("cannot build an axis around a missing value");
  Axis axis;
  if (discrete) {
    axis.values = {0.0, 1.0};
    axis.origin = v0 >= 0.5 ? 1 : 0;
    return axis;
  }
  config.Validate();
  const double width = domain.width();
  if (!(width > 0.0)) {
    axis.values = {v0};
    return axis;
  }
  const double step = config.step_fraction * width;
  const double tol = 1e-9 * width;
  const int steps = config.Steps();
  for (int i = -steps; i <= steps; ++i) {
    const double v = i == 0 ? v0 : v0 + i * step;
    if (i == 0 || (v >= domain.lo - tol && v <= domain.hi + tol)) axis.values.push_back(v);
  }
  // Offsets are generated in increasing order, so v0 sits right after every
  // retained negative offset.
  axis.origin = static_cast<std::size_t>(
      std::find(axis.values.begin(), axis.values.end(), v0) - axis.values.begin());
  return axis;
}

PerturbationGrid MakeGrid(std::span<const double> record, std::size_t fx, std::size_t fy,
                          std::span<const FeatureDomain> domains,
                          const std::vector<bool>& discrete, const GridConfig& config) {
  if (fx == fy) throw InvalidArgument("intervention variables must differ");
  if (fx >= record.size() || fy >= record.size() || domains.size() != record.size() ||
      discrete.size() != record.size()) {
    throw InvalidArgument("intervention index or domain list out of range");
  }
  PerturbationGrid grid;
  grid.fx = fx;
  grid.fy = fy;
  grid.x = BuildAxis(record[fx], domains[fx], discrete[fx], config);
  grid.y = BuildAxis(record[fy], domains[fy], discrete[fy], config);
  return grid;
}

std::vector<std::vector<double>> Perturb2d(std::span<const double> record,
                                           const PerturbationGrid& grid) {
  std::vector<std::vector<double>> points;
  points.reserve(grid.cells());
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      std::vector<double> p(record.begin(), record.end());
      p[grid.fx] = grid.x.values[ix];
      p[grid.fy] = grid.y.values[iy];
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::vector<std::pair<double, double>> IceCurve(const predictor::TreeEnsemble& model,
                                                std::span<const double> record,
                                                std::size_t feature, const Axis& axis) {
  if (feature >= record.size()) throw InvalidArgument("ICE feature index out of range");
  if (IsMissing(record[feature])) throw InvalidArgument("ICE feature is missing in the record");
  std::vector<double> point(record.begin(), record.end());
  std::vector<std::pair<double, double>> curve;
  curve.reserve(axis.size());
  for (const double v : axis.values) {
    point[feature] = v;
    curve.emplace_back(v, model.PredictProba(point));
  }
  return curve;
}

}  // namespace hdpd::pmice
