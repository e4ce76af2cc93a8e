#ifndef HDPD_DIAGRAM_BOUNDARY_H_
#define HDPD_DIAGRAM_BOUNDARY_H_

#include <cstddef>
#include <span>
#include <string_view>

namespace hdpd::diagram {

enum class BoundaryPattern {
  kNoBoundaryAllOnset,
  kNoBoundaryAllNonOnset,
  kUnivariateX,
  kUnivariateY,
  kBivariate,
};

std::string_view ToString(BoundaryPattern pattern);
BoundaryPattern ParseBoundaryPattern(std::string_view text);

inline bool IsNoBoundary(BoundaryPattern p) {
  return p == BoundaryPattern::kNoBoundaryAllOnset || p == BoundaryPattern::kNoBoundaryAllNonOnset;
}
inline bool IsUnivariate(BoundaryPattern p) {
  return p == BoundaryPattern::kUnivariateX || p == BoundaryPattern::kUnivariateY;
}

// Swaps the two univariate classes.
BoundaryPattern Transposed(BoundaryPattern pattern);

// Labels are row-major (cell = iy * nx + ix), 1 = onset. All equal gives a
// no-boundary class; every column constant gives Univariate-X; every row
// constant gives Univariate-Y; anything else is Bivariate.
BoundaryPattern ClassifyBoundary(std::span<const int> labels, std::size_t nx, std::size_t ny);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_BOUNDARY_H_
