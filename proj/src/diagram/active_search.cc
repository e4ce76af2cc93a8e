#include "hdpd/diagram/active_search.h"

#include <algorithm>
#include <random>

#include "hdpd/common/error.h"
#include "hdpd/diagram/label_spreading.h"

namespace hdpd::diagram {

void ActiveLearningConfig::Validate() const {
  if (initial_points < 1) throw InvalidArgument("need at least one initial point");
  if (budget < initial_points) throw InvalidArgument("budget must cover the initial points");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("clamping factor must lie in (0, 1)");
  if (!(gamma > 0.0) || !(tolerance > 0.0) || max_iterations < 1) {
    throw InvalidArgument("invalid label spreading settings");
  }
}

std::vector<std::size_t> InitialCells(std::size_t nx, std::size_t ny, std::size_t origin,
                                      std::size_t count, std::uint64_t seed) {
  const std::size_t n = nx * ny;
  count = std::min(count, n);
  const std::size_t xs[] = {0, nx - 1, 0, nx - 1, nx / 2, nx / 2, 0, nx - 1, nx / 2};
  const std::size_t ys[] = {0, 0, ny - 1, ny - 1, 0, ny - 1, ny / 2, ny / 2, ny / 2};
  std::vector<std::size_t> cells;
  std::vector<bool> taken(n, false);
  auto add = [&](std::size_t c) {
    if (cells.size() < count && !taken[c]) {
      taken[c] = true;
      cells.push_back(c);
    }
  };
  for (std::size_t i = 0; i < 9; ++i) add(ys[i] * nx + xs[i]);
  if (origin < n) add(origin);
  std::mt19937_64 rng(seed);
  while (cells.size() < count) {
    add(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  }
  return cells;
}

ActiveSearchResult ActiveSearch(std::size_t nx, std::size_t ny, std::size_t origin,
                                const std::function<int(std::size_t)>& oracle,
                                const ActiveLearningConfig& config) {
  config.Validate();
  const std::size_t n = nx * ny;
  if (n == 0) throw InvalidArgument("empty grid");
  const std::size_t budget = std::min(config.budget, n);

  ActiveSearchResult result;
  std::vector<int> clamped(n, -1);
  result.queried.assign(n, false);
  auto query = [&](std::size_t cell) {
    const int label = oracle(cell);
    if (label != 0 && label != 1) throw ComputationError("oracle returned a non-binary label");
    clamped[cell] = label;
    result.queried[cell] = true;
    ++result.queries;
  };
  for (const std::size_t c : InitialCells(nx, ny, origin, std::min(config.initial_points, budget),
                                          config.seed)) {
    query(c);
  }

  const Matrix s = SymmetricNormalize(GridAffinity(nx, ny, config.gamma));
  const SpreadingOptions options{config.alpha, config.tolerance, config.max_iterations};
  SpreadingResult spread = LabelSpreading(s, clamped, 2, options);
  if (budget == n) {
    // Every cell gets queried, so the query order is irrelevant.
    for (std::size_t c = 0; c < n; ++c) {
      if (!result.queried[c]) query(c);
    }
    spread = LabelSpreading(s, clamped, 2, options, &spread.scores);
  }
  while (result.queries < budget) {
    std::size_t pick = n;
    double best = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (result.queried[c]) continue;
      const double u = 1.0 - std::max(spread.posterior(c, 0), spread.posterior(c, 1));
      if (u > best) {
        best = u;
        pick = c;
      }
    }
    query(pick);
    spread = LabelSpreading(s, clamped, 2, options, &spread.scores);
  }

  result.labels.resize(n);
  result.onset_posterior.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    result.onset_posterior[c] = spread.posterior(c, 1);
    result.labels[c] = result.queried[c] ? clamped[c]
                                         : (spread.posterior(c, 1) > spread.posterior(c, 0) ? 1 : 0);
  }
  return result;
}

}  // namespace hdpd::diagram
