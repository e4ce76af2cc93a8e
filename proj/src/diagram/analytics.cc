#include "hdpd/diagram/analytics.h"

#include <algorithm>

#include "hdpd/common/error.h"

namespace hdpd::diagram {

std::vector<double> FeatureContribution(std::span<const Diagram> diagrams,
                                        std::size_t n_features) {
  std::vector<double> included(n_features, 0.0);
  std::vector<double> contributing(n_features, 0.0);
  for (const auto& d : diagrams) {
    if (d.fx >= n_features || d.fy >= n_features) {
      throw InvalidArgument("diagram variable outside the feature list");
    }
    included[d.fx] += 1.0;
    included[d.fy] += 1.0;
    const bool bivariate = d.pattern == BoundaryPattern::kBivariate;
    if (bivariate || d.pattern == BoundaryPattern::kUnivariateX) contributing[d.fx] += 1.0;
    if (bivariate || d.pattern == BoundaryPattern::kUnivariateY) contributing[d.fy] += 1.0;
  }
  std::vector<double> out(n_features, 0.0);
  for (std::size_t f = 0; f < n_features; ++f) {
    if (included[f] > 0.0) out[f] = contributing[f] / included[f];
  }
  return out;
}

std::optional<double> BivariateProportion(std::span<const Diagram> diagrams) {
  std::size_t bivariate = 0;
  std::size_t univariate = 0;
  for (const auto& d : diagrams) {
    if (d.pattern == BoundaryPattern::kBivariate) ++bivariate;
    if (IsUnivariate(d.pattern)) ++univariate;
  }
  if (bivariate + univariate == 0) return std::nullopt;
  return static_cast<double>(bivariate) / static_cast<double>(bivariate + univariate);
}

LimitValues ExtractLimits(const Diagram& diagram, PrimaryAxis primary,
                          std::optional<cohort::RiskDirection> direction) {
  if (!direction) throw InvalidArgument("primary variable has no risk direction");
  const bool low_is_risk = *direction == cohort::RiskDirection::kLowIsRisk;
  const auto& axis = primary == PrimaryAxis::kX ? diagram.axis_x : diagram.axis_y;
  const std::size_t levels = primary == PrimaryAxis::kX ? diagram.ny() : diagram.nx();
  LimitValues out;
  out.limits.reserve(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    double limit = low_is_risk ? axis.front() : axis.back();
    bool found = false;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const int label =
          primary == PrimaryAxis::kX ? diagram.LabelAt(i, j) : diagram.LabelAt(j, i);
      if (label != 1) continue;
      if (!found) {
        limit = axis[i];
        found = true;
      } else {
        limit = low_is_risk ? std::max(limit, axis[i]) : std::min(limit, axis[i]);
      }
    }
    out.limits.push_back(limit);
  }
  out.min = *std::min_element(out.limits.begin(), out.limits.end());
  out.max = *std::max_element(out.limits.begin(), out.limits.end());
  return out;
}

std::size_t SuperimposedGrid::FreeCells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.empty(); }));
}

SuperimposedGrid Superimpose(std::span<const Diagram> diagrams) {
  if (diagrams.empty()) throw InvalidArgument("nothing to superimpose");
  const Diagram& first = diagrams.front();
  SuperimposedGrid out;
  out.record_id = first.record_id;
  out.var_x = first.var_x;
  out.var_y = first.var_y;
  out.axis_x = first.axis_x;
  out.axis_y = first.axis_y;
  out.cells.resize(first.cells());
  for (const auto& d : diagrams) {
    if (d.record_id != first.record_id || d.var_x != first.var_x || d.var_y != first.var_y) {
      throw InvalidArgument("superimposed diagrams must share record and variables");
    }
    if (d.axis_x != first.axis_x || d.axis_y != first.axis_y) {
      throw InvalidArgument("superimposed diagrams have different axes");
    }
    for (std::size_t c = 0; c < d.cells(); ++c) {
      if (d.label[c] == 1) out.cells[c].push_back(d.disease);
    }
  }
  for (auto& c : out.cells) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return out;
}

}  // namespace hdpd::diagram
