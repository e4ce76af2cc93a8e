#include "hdpd/pmice/projector.h"

#include <algorithm>
#include <cmath>

#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"

namespace hdpd::pmice {

void ReferenceData::Validate() const {
  const std::size_t n = values.rows();
  if (labels.size() != n || participants.size() != n || years.size() != n) {
    throw InvalidArgument("reference data columns differ in length");
  }
}

std::vector<bool> FutureExclusion(const ReferenceData& reference,
                                  const std::string& participant, int year) {
  std::vector<bool> mask(reference.values.rows(), false);
  for (std::size_t r = 0; r < mask.size(); ++r) {
    mask[r] = reference.participants[r] == participant && reference.years[r] >= year;
  }
  return mask;
}

PairProjector::PairProjector(const ReferenceData& reference, const FeatureSpace& space,
                             std::span<const double> original, std::size_t fx, std::size_t fy,
                             const std::vector<bool>& excluded)
    : reference_(reference),
      space_(space),
      original_(original.begin(), original.end()),
      fx_(fx),
      fy_(fy),
      excluded_(excluded.begin(), excluded.end()) {
  reference.Validate();
  const std::size_t cols = space.size();
  if (original.size() != cols || reference.values.cols() != cols || fx >= cols || fy >= cols ||
      fx == fy) {
    throw InvalidArgument("projector inputs do not match the feature space");
  }
  if (excluded_.empty()) excluded_.assign(reference.values.rows(), false);
  if (excluded_.size() != reference.values.rows()) {
    throw InvalidArgument("exclusion mask does not match the reference rows");
  }
  base_sq_.assign(reference.values.rows(), 0.0);
  base_mismatch_.assign(reference.values.rows(), 0);
  for (std::size_t r = 0; r < reference.values.rows(); ++r) {
    const auto row = reference.values.Row(r);
    double sq = 0.0;
    int mis = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == fx || c == fy) continue;
      sq += Axis2(c, original_[c], row[c]);
      mis += Mismatch(c, original_[c], row[c]);
    }
    base_sq_[r] = sq;
    base_mismatch_[r] = mis;
  }
}

double PairProjector::Axis2(std::size_t c, double a, double b) const {
  if (!space_.Scaled(c) || IsMissing(a) || IsMissing(b)) return 0.0;
  const double d = (a - b) / space_.domains[c].width();
  return d * d;
}

int PairProjector::Mismatch(std::size_t c, double a, double b) const {
  if (!space_.discrete[c] || IsMissing(a) || IsMissing(b)) return 0;
  return a != b ? 1 : 0;
}

namespace {

// Keeps the `keep` smallest distances in ascending order; equal distances stay
// in insertion order.
class TopK {
 public:
  explicit TopK(std::size_t keep) : keep_(keep) { items_.reserve(keep + 1); }

  bool Accepts(double distance) const {
    return items_.size() < keep_ || distance < items_.back().distance;
  }
  void Offer(std::ptrdiff_t row, double distance) {
    if (!Accepts(distance)) return;
    auto pos = items_.end();
    while (pos != items_.begin() && (pos - 1)->distance > distance) --pos;
    items_.insert(pos, {row, distance});
    if (items_.size() > keep_) items_.pop_back();
  }
  std::vector<Neighbor> Take() { return std::move(items_); }

 private:
  std::size_t keep_;
  std::vector<Neighbor> items_;
};

}  // namespace

PairProjector::Ranked PairProjector::Rank(double x, double y, int label, std::size_t keep,
                                          bool stratify) const {
  TopK strict(keep);
  TopK relaxed(keep);
  Ranked out;
  auto offer = [&](std::ptrdiff_t row, double sq, int mis) {
    ++out.total;
    if (mis == 0) {
      ++out.strict_total;
      const double d = std::sqrt(sq);
      strict.Offer(row, d);
      relaxed.Offer(row, d);
    } else if (relaxed.Accepts(mis)) {
      relaxed.Offer(row, std::sqrt(sq) + mis);
    }
  };
  // Candidates are visited in tie-break order: original record, then rows.
  offer(kOriginalRow, Axis2(fx_, x, original_[fx_]) + Axis2(fy_, y, original_[fy_]),
        stratify ? Mismatch(fx_, x, original_[fx_]) + Mismatch(fy_, y, original_[fy_]) : 0);
  const std::size_t cols = reference_.values.cols();
  const double* data = reference_.values.data().data();
  const std::size_t rows = reference_.values.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    if (reference_.labels[r] != label || excluded_[r]) continue;
    const double* row = data + r * cols;
    const double sq = base_sq_[r] + Axis2(fx_, x, row[fx_]) + Axis2(fy_, y, row[fy_]);
    const int mis =
        stratify ? base_mismatch_[r] + Mismatch(fx_, x, row[fx_]) + Mismatch(fy_, y, row[fy_]) : 0;
    offer(static_cast<std::ptrdiff_t>(r), sq, mis);
  }
  out.strict = strict.Take();
  out.relaxed = relaxed.Take();
  return out;
}

std::vector<std::vector<Neighbor>> PairProjector::NeighborsMulti(double x, double y, int label,
                                                                 std::span<const int> ks,
                                                                 bool stratify_discrete) const {
  int kmax = 0;
  for (const int k : ks) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    kmax = std::max(kmax, k);
  }
  const Ranked ranked = Rank(x, y, label, static_cast<std::size_t>(kmax), stratify_discrete);
  std::vector<std::vector<Neighbor>> out;
  out.reserve(ks.size());
  for (const int k : ks) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& source = ranked.strict_total >= uk ? ranked.strict : ranked.relaxed;
    if (source.size() < uk) {
      Log().debug("only {} reference candidates for k = {}", source.size(), k);
    }
    const std::size_t n = std::min(uk, source.size());
    out.emplace_back(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

std::vector<Neighbor> PairProjector::Neighbors(double x, double y, int label, int k,
                                               bool stratify_discrete) const {
  const int ks[] = {k};
  return std::move(NeighborsMulti(x, y, label, ks, stratify_discrete).front());
}

std::vector<double> PairProjector::ProjectWith(double x, double y,
                                               std::span<const Neighbor> neighbors,
                                               WeightScheme scheme) const {
  std::vector<double> distances;
  std::vector<std::span<const double>> rows;
  distances.reserve(neighbors.size());
  rows.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    distances.push_back(n.distance);
    rows.push_back(n.row == kOriginalRow
                       ? std::span<const double>(original_)
                       : reference_.values.Row(static_cast<std::size_t>(n.row)));
  }
  std::vector<double> point = original_;
  point[fx_] = x;
  point[fy_] = y;
  const std::size_t intervention[] = {fx_, fy_};
  return pmice::Project(point, intervention, rows, ProjectionWeights(distances, scheme));
}

std::vector<double> PairProjector::Project(double x, double y, int label,
                                           const ProjectionConfig& config) const {
  config.Validate();
  return ProjectWith(x, y, Neighbors(x, y, label, config.k, config.stratify_discrete),
                     config.weights);
}

}  // namespace hdpd::pmice
