#include "hdpd/diagram/boundary.h"

#include <string>

#include "hdpd/common/error.h"

namespace hdpd::diagram {

std::string_view ToString(BoundaryPattern pattern) {
  switch (pattern) {
    case BoundaryPattern::kNoBoundaryAllOnset: return "no-boundary-all-onset";
    case BoundaryPattern::kNoBoundaryAllNonOnset: return "no-boundary-all-non-onset";
    case BoundaryPattern::kUnivariateX: return "univariate-x";
    case BoundaryPattern::kUnivariateY: return "univariate-y";
    case BoundaryPattern::kBivariate: return "bivariate";
  }
  return "?";
}

BoundaryPattern ParseBoundaryPattern(std::string_view text) {
  for (const auto p : {BoundaryPattern::kNoBoundaryAllOnset, BoundaryPattern::kNoBoundaryAllNonOnset,
                       BoundaryPattern::kUnivariateX, BoundaryPattern::kUnivariateY,
                       BoundaryPattern::kBivariate}) {
    if (ToString(p) == text) return p;
  }
  throw InvalidArgument("unknown boundary pattern '" + std::string(text) + "'");
}

BoundaryPattern Transposed(BoundaryPattern pattern) {
  if (pattern == BoundaryPattern::kUnivariateX) return BoundaryPattern::kUnivariateY;
  if (pattern == BoundaryPattern::kUnivariateY) return BoundaryPattern::kUnivariateX;
  return pattern;
}

BoundaryPattern ClassifyBoundary(std::span<const int> labels, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0 || labels.size() != nx * ny) {
    throw InvalidArgument("label grid does not match its dimensions");
  }
  bool all_same = true;
  for (const int v : labels) {
    if (v != 0 && v != 1) throw InvalidArgument("label grid must be fully labelled with 0/1");
    all_same = all_same && v == labels[0];
  }
  if (all_same) {
    return labels[0] == 1 ? BoundaryPattern::kNoBoundaryAllOnset
                          : BoundaryPattern::kNoBoundaryAllNonOnset;
  }
  bool columns_constant = true;
  for (std::size_t iy = 1; iy < ny && columns_constant; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (labels[iy * nx + ix] != labels[ix]) {
        columns_constant = false;
        break;
      }
    }
  }
  if (columns_constant) return BoundaryPattern::kUnivariateX;
  bool rows_constant = true;
  for (std::size_t iy = 0; iy < ny && rows_constant; ++iy) {
    for (std::size_t ix = 1; ix < nx; ++ix) {
      if (labels[iy * nx + ix] != labels[iy * nx]) {
        rows_constant = false;
        break;
      }
    }
  }
  if (rows_constant) return BoundaryPattern::kUnivariateY;
  return BoundaryPattern::kBivariate;
}

}  // namespace hdpd::diagram
