#ifndef HDPD_DIAGRAM_DIAGRAM_H_
#define HDPD_DIAGRAM_DIAGRAM_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hdpd/diagram/boundary.h"

namespace hdpd::diagram {

enum class DiagramMode { kIce2d, kPmice };

std::string_view ToString(DiagramMode mode);
DiagramMode ParseDiagramMode(std::string_view text);

// Health-disease phase diagram of one record over two intervention variables.
// Grids are row-major with x varying fastest (cell = iy * nx + ix).
struct Diagram {
  std::string record_id;
  std::string disease;
  std::string var_x;
  std::string var_y;
  std::size_t fx = 0;
  std::size_t fy = 0;
  std::vector<double> axis_x;
  std::vector<double> axis_y;
  std::size_t origin_x = 0;
  std::size_t origin_y = 0;
  double threshold = 0.5;
  std::vector<double> prob;  // NaN where the model was not queried
  std::vector<int> label;    // 1 = onset
  DiagramMode mode = DiagramMode::kPmice;
  std::vector<bool> queried;  // empty for full search
  BoundaryPattern pattern = BoundaryPattern::kNoBoundaryAllNonOnset;

  std::size_t nx() const { return axis_x.size(); }
  std::size_t ny() const { return axis_y.size(); }
  std::size_t cells() const { return nx() * ny(); }
  bool active() const { return !queried.empty(); }
  int LabelAt(std::size_t ix, std::size_t iy) const { return label[iy * nx() + ix]; }

  // Throws InvalidArgument when grid sizes disagree, a queried label
  // contradicts its probability and threshold, or the pattern is stale.
  void Validate() const;
};

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_DIAGRAM_H_
