#ifndef HDPD_DIAGRAM_WARD_H_
#define HDPD_DIAGRAM_WARD_H_

#include <cstddef>
#include <vector>

#include "hdpd/common/matrix.h"

namespace hdpd::diagram {

// Cluster ids: leaves are 0..n-1, the i-th merge creates cluster n + i.
struct Merge {
  std::size_t a = 0;  // smaller id
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<Merge> merges;
  std::vector<std::size_t> order;  // leaves in left-to-right tree order
};

// Ward agglomerative clustering on Euclidean distances (Lance-Williams
// update, merge heights on the Euclidean scale). Equal distances merge the
// pair with the smallest cluster ids first. Throws InvalidArgument for fewer
// than two rows or non-finite entries.
Dendrogram WardCluster(const Matrix& rows);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_WARD_H_
