#ifndef HDPD_EVAL_STATISTICS_H_
#define HDPD_EVAL_STATISTICS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace hdpd::eval {

double Mean(std::span<const double> v);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double SampleSd(std::span<const double> v);
// Average of the two middle values for even counts.
double Median(std::vector<double> v);

// Midranks (1-based) of the values.
std::vector<double> MidRanks(std::span<const double> values);

inline constexpr std::size_t kExactRankSumLimit = 12;

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample
  double p = 1.0;          // two-sided
  bool exact = false;
};

// Two-sided Wilcoxon rank-sum test. For a combined size up to
// kExactRankSumLimit the null distribution is enumerated over all splits of
// the midranks and p = P(|W - mu| >= |w - mu|); larger samples use the normal
// approximation with tie and continuity corrections. Throws InvalidArgument
// for an empty sample.
RankSumResult WilcoxonRankSum(std::span<const double> a, std::span<const double> b);

struct PairedTResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  double mean_difference = 0.0;
  double sd_difference = 0.0;
  bool degenerate = false;  // zero spread of the differences
};

// Two-sided paired t-test on a - b. Zero spread gives p = 0 when the mean
// difference is non-zero and p = 1 otherwise. Throws InvalidArgument when the
// samples differ in length or have fewer than two pairs.
PairedTResult PairedT(std::span<const double> a, std::span<const double> b);

}  // namespace hdpd::eval

#endif  // HDPD_EVAL_STATISTICS_H_
