#include "hdpd/eval/statistics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "hdpd/common/error.h"

namespace hdpd::eval {

double Mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SampleSd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double Median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Counts subsets of size `take` from ranks[start..] whose sum deviates from
// mu by at least `observed`.
void Enumerate(const std::vector<double>& ranks, std::size_t start, std::size_t take, double sum,
               double mu, double observed, std::size_t& extreme, std::size_t& total) {
  if (take == 0) {
    ++total;
    if (std::abs(sum - mu) >= observed - 1e-9) ++extreme;
    return;
  }
  for (std::size_t i = start; i + take <= ranks.size(); ++i) {
    Enumerate(ranks, i + 1, take - 1, sum + ranks[i], mu, observed, extreme, total);
  }
}

}  // namespace

RankSumResult WilcoxonRankSum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("rank-sum test needs two non-empty samples");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (const double v : pooled) {
    if (!std::isfinite(v)) throw InvalidArgument("rank-sum test needs finite values");
  }
  const std::vector<double> ranks = MidRanks(pooled);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double n = na + nb;
  RankSumResult result;
  result.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double mu = na * (n + 1.0) / 2.0;
  const double observed = std::abs(result.statistic - mu);

  if (pooled.size() <= kExactRankSumLimit) {
    std::size_t extreme = 0;
    std::size_t total = 0;
    Enumerate(ranks, 0, a.size(), 0.0, mu, observed, extreme, total);
    result.exact = true;
    result.p = static_cast<double>(extreme) / static_cast<double>(total);
    return result;
  }

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double variance = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    result.p = 1.0;
    return result;
  }
  const double z = std::max(0.0, observed - 0.5) / std::sqrt(variance);
  result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

PairedTResult PairedT(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
  if (a.size() < 2) throw InvalidArgument("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  PairedTResult r;
  r.df = static_cast<double>(d.size() - 1);
  r.mean_difference = Mean(d);
  r.sd_difference = SampleSd(d);
  if (!(r.sd_difference > 0.0)) {
    r.degenerate = true;
    if (r.mean_difference == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_difference);
      r.p = 0.0;
    }
    return r;
  }
  r.t = r.mean_difference / (r.sd_difference / std::sqrt(static_cast<double>(d.size())));
  const boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

}  // namespace hdpd::eval
