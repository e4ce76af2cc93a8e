#ifndef HDPD_PMICE_NEIGHBORS_H_
#define HDPD_PMICE_NEIGHBORS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hdpd/common/matrix.h"
#include "hdpd/pmice/domain.h"

namespace hdpd::pmice {

enum class WeightScheme { kExponential, kInverseDistance, kUniform };

// Which label selects the reference pool: the 2d-ICE point's predicted label
// or the original record's.
enum class PoolLabel { kPerturbedPoint, kOriginalRecord };

std::string_view ToString(WeightScheme scheme);
WeightScheme ParseWeightScheme(std::string_view text);
std::string_view ToString(PoolLabel source);
PoolLabel ParsePoolLabel(std::string_view text);

struct ProjectionConfig {
  int k = 6;
  WeightScheme weights = WeightScheme::kExponential;
  PoolLabel pool_label = PoolLabel::kPerturbedPoint;
  bool stratify_discrete = true;

  void Validate() const;
};

// Column metadata for distance computation.
struct FeatureSpace {
  std::vector<bool> discrete;
  std::vector<FeatureDomain> domains;

  std::size_t size() const { return discrete.size(); }
  // True for continuous columns with a positive domain width.
  bool Scaled(std::size_t c) const { return !discrete[c] && domains[c].width() > 0.0; }
};

// Euclidean distance over continuous features, each divided by its domain
// width. Discrete and zero-width features do not contribute; a feature missing
// on either side is skipped.
double NormalizedDistance(std::span<const double> a, std::span<const double> b,
                          const FeatureSpace& space);

// Number of discrete features that differ (missing on either side is skipped).
int DiscreteMismatches(std::span<const double> a, std::span<const double> b,
                       const FeatureSpace& space);

inline constexpr std::ptrdiff_t kOriginalRow = -1;

struct Neighbor {
  std::ptrdiff_t row = kOriginalRow;  // pool row, or kOriginalRow
  double distance = 0.0;
};

// k nearest candidates for a 2d-ICE point. Candidates are the original record
// plus pool rows whose label equals `label` and that are not excluded. With
// stratification, only candidates matching the point on every discrete feature
// are used when there are at least k of them; otherwise all candidates are
// ranked by distance + number of discrete mismatches. Ties go to the original
// record, then to the lower row index. Fewer than k candidates returns all.
std::vector<Neighbor> KnnCandidates(std::span<const double> point,
                                    std::span<const double> original, const Matrix& pool,
                                    std::span<const int> pool_labels, int label,
                                    const FeatureSpace& space, const ProjectionConfig& config,
                                    const std::vector<bool>& excluded = {});

// Non-negative weights summing to one.
std::vector<double> ProjectionWeights(std::span<const double> distances, WeightScheme scheme);

// Weighted average of the neighbours on every column except the intervention
// columns, which keep the point's values. Missing neighbour values are skipped
// and the remaining weights renormalised; a column missing everywhere keeps the
// point's value.
std::vector<double> Project(std::span<const double> point,
                            std::span<const std::size_t> intervention,
                            std::span<const std::span<const double>> neighbor_rows,
                            std::span<const double> weights);

}  // namespace hdpd::pmice

#endif  // HDPD_PMICE_NEIGHBORS_H_
