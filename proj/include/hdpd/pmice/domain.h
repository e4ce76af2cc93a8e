#ifndef HDPD_PMICE_DOMAIN_H_
#define HDPD_PMICE_DOMAIN_H_

#include <span>
#include <vector>

#include "hdpd/common/matrix.h"

namespace hdpd::pmice {

// Clipped value range of a feature on the training rows.
struct FeatureDomain {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Percentile of an ascending sample by linear interpolation between order
// statistics (position q * (n - 1)). q in [0, 1].
double Percentile(std::span<const double> sorted, double q);

// [q, 1 - q] percentile range of the non-missing values. Throws
// InvalidArgument when every value is missing.
FeatureDomain ComputeDomain(std::span<const double> values, double clip = 0.005);

// One domain per column of the training matrix (NaN = missing). Discrete
// columns get [0, 1].
std::vector<FeatureDomain> ComputeDomains(const Matrix& training,
                                          const std::vector<bool>& discrete,
                                          double clip = 0.005);

}  // namespace hdpd::pmice

#endif  // HDPD_PMICE_DOMAIN_H_
