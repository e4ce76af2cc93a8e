#include "hdpd/pmice/neighbors.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"

namespace hdpd::pmice {

std::string_view ToString(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kExponential: return "exponential";
    case WeightScheme::kInverseDistance: return "inverse";
    case WeightScheme::kUniform: return "uniform";
  }
  return "?";
}

WeightScheme ParseWeightScheme(std::string_view text) {
  if (text == "exponential") return WeightScheme::kExponential;
  if (text == "inverse") return WeightScheme::kInverseDistance;
  if (text == "uniform") return WeightScheme::kUniform;
  throw InvalidArgument("unknown weight scheme '" + std::string(text) + "'");
}

std::string_view ToString(PoolLabel source) {
  return source == PoolLabel::kPerturbedPoint ? "perturbed" : "original";
}

PoolLabel ParsePoolLabel(std::string_view text) {
  if (text == "perturbed") return PoolLabel::kPerturbedPoint;
  if (text == "original") return PoolLabel::kOriginalRecord;
  throw InvalidArgument("unknown pool label source '" + std::string(text) + "'");
}

void ProjectionConfig::Validate() const {
  if (k < 1) throw InvalidArgument("k must be at least 1");
}

double NormalizedDistance(std::span<const double> a, std::span<const double> b,
                          const FeatureSpace& space) {
  if (a.size() != space.size() || b.size() != space.size()) {
    throw InvalidArgument("distance operands do not match the feature space");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (!space.Scaled(c) || IsMissing(a[c]) || IsMissing(b[c])) continue;
    const double d = (a[c] - b[c]) / space.domains[c].width();
    sum += d * d;
  }
  return std::sqrt(sum);
}

int DiscreteMismatches(std::span<const double> a, std::span<const double> b,
                       const FeatureSpace& space) {
  int n = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (!space.discrete[c] || IsMissing(a[c]) || IsMissing(b[c])) continue;
    if (a[c] != b[c]) ++n;
  }
  return n;
}

std::vector<Neighbor> KnnCandidates(std::span<const double> point,
                                    std::span<const double> original, const Matrix& pool,
                                    std::span<const int> pool_labels, int label,
                                    const FeatureSpace& space, const ProjectionConfig& config,
                                    const std::vector<bool>& excluded) {
  config.Validate();
  if (pool_labels.size() != pool.rows() || (!excluded.empty() && excluded.size() != pool.rows())) {
    throw InvalidArgument("pool labels or exclusion mask do not match the pool");
  }
  struct Candidate {
    std::ptrdiff_t row;
    double distance;
    int mismatches;
  };
  std::vector<Candidate> all;
  auto consider = [&](std::ptrdiff_t row, std::span<const double> values) {
    const int m = config.stratify_discrete ? DiscreteMismatches(point, values, space) : 0;
    all.push_back({row, NormalizedDistance(point, values, space), m});
  };
  consider(kOriginalRow, original);
  for (std::size_t r = 0; r < pool.rows(); ++r) {
    if (pool_labels[r] != label || (!excluded.empty() && excluded[r])) continue;
    consider(static_cast<std::ptrdiff_t>(r), pool.Row(r));
  }
  const auto k = static_cast<std::size_t>(config.k);
  const auto exact = static_cast<std::size_t>(
      std::count_if(all.begin(), all.end(), [](const Candidate& c) { return c.mismatches == 0; }));
  std::vector<Neighbor> ranked;
  if (exact >= k) {
    for (const auto& c : all) {
      if (c.mismatches == 0) ranked.push_back({c.row, c.distance});
    }
  } else {
    for (const auto& c : all) ranked.push_back({c.row, c.distance + c.mismatches});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance;
  });
  if (ranked.size() < k) {
    Log().warn("only {} reference candidates for k = {}", ranked.size(), k);
  } else {
    ranked.resize(k);
  }
  return ranked;
}

std::vector<double> ProjectionWeights(std::span<const double> distances, WeightScheme scheme) {
  if (distances.empty()) throw InvalidArgument("no neighbours to weight");
  std::vector<double> w(distances.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = distances[i];
    if (!(d >= 0.0)) throw InvalidArgument("neighbour distance must be non-negative");
    switch (scheme) {
      case WeightScheme::kExponential: w[i] = std::exp(-d); break;
      case WeightScheme::kInverseDistance: w[i] = 1.0 / (d + 1e-9); break;
      case WeightScheme::kUniform: w[i] = 1.0; break;
    }
  }
  double total = 0.0;
  for (const double v : w) total += v;
  if (!(total > 0.0)) {
    // exp underflow for very distant neighbours
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> Project(std::span<const double> point,
                            std::span<const std::size_t> intervention,
                            std::span<const std::span<const double>> neighbor_rows,
                            std::span<const double> weights) {
  if (neighbor_rows.size() != weights.size() || neighbor_rows.empty()) {
    throw InvalidArgument("neighbour rows and weights differ in length");
  }
  std::vector<double> out(point.begin(), point.end());
  for (std::size_t c = 0; c < point.size(); ++c) {
    if (std::find(intervention.begin(), intervention.end(), c) != intervention.end()) continue;
    double sum = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < neighbor_rows.size(); ++i) {
      const double v = neighbor_rows[i][c];
      if (IsMissing(v)) continue;
      sum += weights[i] * v;
      wsum += weights[i];
    }
    if (wsum > 0.0) out[c] = sum / wsum;
  }
  return out;
}

}  // namespace hdpd::pmice
