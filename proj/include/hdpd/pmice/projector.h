#ifndef HDPD_PMICE_PROJECTOR_H_
#define HDPD_PMICE_PROJECTOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hdpd/common/matrix.h"
#include "hdpd/pmice/neighbors.h"

namespace hdpd::pmice {

// Training rows in model-feature space with their dataset labels and origin.
struct ReferenceData {
  Matrix values;
  std::vector<int> labels;
  std::vector<std::string> participants;
  std::vector<int> years;

  void Validate() const;
};

// Mask of reference rows belonging to `participant` at or after `year`
// (the record itself and its future).
std::vector<bool> FutureExclusion(const ReferenceData& reference,
                                  const std::string& participant, int year);

// k-NN projection specialised to points that differ from one record only at
// two intervention columns. Distance terms over the other columns are
// computed once per construction. Results equal KnnCandidates / Project on
// the same inputs.
class PairProjector {
 public:
  PairProjector(const ReferenceData& reference, const FeatureSpace& space,
                std::span<const double> original, std::size_t fx, std::size_t fy,
                const std::vector<bool>& excluded = {});

  // Nearest candidates of the point (x, y) within the pool for `label`.
  std::vector<Neighbor> Neighbors(double x, double y, int label, int k,
                                  bool stratify_discrete = true) const;

  // Neighbour lists for several k at once (one distance pass).
  std::vector<std::vector<Neighbor>> NeighborsMulti(double x, double y, int label,
                                                    std::span<const int> ks,
                                                    bool stratify_discrete = true) const;

  std::vector<double> ProjectWith(double x, double y, std::span<const Neighbor> neighbors,
                                  WeightScheme scheme) const;

  std::vector<double> Project(double x, double y, int label, const ProjectionConfig& config) const;

  std::span<const double> original() const { return original_; }

 private:
  struct Ranked {
    std::vector<Neighbor> strict;   // exact discrete matches, sorted
    std::vector<Neighbor> relaxed;  // all candidates with mismatch penalty, sorted
    std::size_t strict_total = 0;
    std::size_t total = 0;
  };
  Ranked Rank(double x, double y, int label, std::size_t keep, bool stratify) const;
  double Axis2(std::size_t c, double a, double b) const;
  int Mismatch(std::size_t c, double a, double b) const;

  const ReferenceData& reference_;
  const FeatureSpace& space_;
  std::vector<double> original_;
  std::size_t fx_;
  std::size_t fy_;
  std::vector<bool> excluded_;
  std::vector<double> base_sq_;      // per row, squared distance over other columns
  std::vector<int> base_mismatch_;   // per row, discrete mismatches over other columns
};

}  // namespace hdpd::pmice

#endif  // HDPD_PMICE_PROJECTOR_H_
