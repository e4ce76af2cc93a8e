#ifndef HDPD_INTERFACE_PLOT_H_
#define HDPD_INTERFACE_PLOT_H_

#include <string>

#include "hdpd/diagram/analytics.h"
#include "hdpd/diagram/diagram.h"
#include "hdpd/diagram/ward.h"

namespace hdpd::interface {

struct PlotOptions {
  int cell_px = 18;
  int margin_px = 64;
  int max_ticks = 6;
};

// Static SVG documents. Diagram cells: onset red, non-onset blue, shaded by
// probability when it is known; queried cells carry a dot, the record's own
// cell a ring.
std::string DiagramSvg(const diagram::Diagram& diagram, const PlotOptions& options = {});

// Cells shaded by the number of onset diseases; jointly free cells green.
std::string SuperimposedSvg(const diagram::SuperimposedGrid& grid,
                            const PlotOptions& options = {});

// Records x features heat map, rows in dendrogram leaf order when given.
std::string ContributionSvg(const diagram::ContributionMatrix& matrix,
                            const diagram::Dendrogram* tree, const PlotOptions& options = {});

}  // namespace hdpd::interface

#endif  // HDPD_INTERFACE_PLOT_H_
