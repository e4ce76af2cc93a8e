#ifndef HDPD_DIAGRAM_ACTIVE_SEARCH_H_
#define HDPD_DIAGRAM_ACTIVE_SEARCH_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace hdpd::diagram {

struct ActiveLearningConfig {
  std::size_t initial_points = 10;
  std::size_t budget = 50;
  double alpha = 0.2;
  double gamma = 20.0;
  double tolerance = 1e-10;
  int max_iterations = 1000;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct ActiveSearchResult {
  std::vector<int> labels;            // completed grid, row-major
  std::vector<bool> queried;
  std::vector<double> onset_posterior;  // final spreading posterior of class 1
  std::size_t queries = 0;
};

// Deterministic seed cells: corners, edge midpoints, centre and the origin
// cell, de-duplicated in that order and back-filled with seeded random cells
// up to `count` (at most the grid size).
std::vector<std::size_t> InitialCells(std::size_t nx, std::size_t ny, std::size_t origin,
                                      std::size_t count, std::uint64_t seed);

// Uncertainty sampling over the grid graph. `oracle(cell)` returns the true
// label (0/1) of a cell and is called once per queried cell. The budget is
// clamped to the grid size. Unqueried cells take the posterior argmax, ties
// going to non-onset.
ActiveSearchResult ActiveSearch(std::size_t nx, std::size_t ny, std::size_t origin,
                                const std::function<int(std::size_t)>& oracle,
                                const ActiveLearningConfig& config = {});

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_ACTIVE_SEARCH_H_
