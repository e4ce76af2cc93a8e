#include "hdpd/pmice/domain.h"

#include <algorithm>
#include <cmath>

#include "hdpd/common/error.h"

namespace hdpd::pmice {

double Percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile q outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lower);
  return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

FeatureDomain ComputeDomain(std::span<const double> values, double clip) {
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (const double v : values) {
    if (!IsMissing(v)) sorted.push_back(v);
  }
  if (sorted.empty()) throw InvalidArgument("domain of an all-missing feature");
  std::sort(sorted.begin(), sorted.end());
  return {Percentile(sorted, clip), Percentile(sorted, 1.0 - clip)};
}

std::vector<FeatureDomain> ComputeDomains(const Matrix& training,
                                          const std::vector<bool>& discrete, double clip) {
  if (discrete.size() != training.cols()) {
    throw InvalidArgument("discrete mask does not match the training width");
  }
  std::vector<FeatureDomain> out(training.cols());
  std::vector<double> column(training.rows());
  for (std::size_t c = 0; c < training.cols(); ++c) {
    if (discrete[c]) {
      out[c] = {0.0, 1.0};
      continue;
    }
    for (std::size_t r = 0; r < training.rows(); ++r) column[r] = training(r, c);
    out[c] = ComputeDomain(column, clip);
  }
  return out;
}

}  // namespace hdpd::pmice
