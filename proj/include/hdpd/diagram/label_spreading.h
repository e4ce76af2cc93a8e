#ifndef HDPD_DIAGRAM_LABEL_SPREADING_H_
#define HDPD_DIAGRAM_LABEL_SPREADING_H_

#include <cstddef>
#include <span>

#include "hdpd/common/matrix.h"

namespace hdpd::diagram {

// Dense RBF affinity exp(-gamma * |ci - cj|^2) over grid coordinates scaled
// to [0, 1] per axis (a singleton axis maps to 0); zero diagonal.
Matrix GridAffinity(std::size_t nx, std::size_t ny, double gamma);

// D^-1/2 W D^-1/2. Rows of isolated nodes stay zero.
Matrix SymmetricNormalize(const Matrix& w);

struct SpreadingOptions {
  double alpha = 0.2;
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

struct SpreadingResult {
  Matrix scores;     // converged F (nodes x classes)
  Matrix posterior;  // rows of F normalised to sum 1 (uniform where F is zero)
  int iterations = 0;
  bool converged = false;
};

// Iterates F <- alpha * S * F + (1 - alpha) * Y until the largest change is
// below the tolerance. labels[i] in [0, classes) clamps node i; -1 leaves it
// free. `warm_start` (same shape as the result) seeds F. Throws InvalidArgument
// when no node is labelled.
SpreadingResult LabelSpreading(const Matrix& s, std::span<const int> labels, int classes,
                               const SpreadingOptions& options = {},
                               const Matrix* warm_start = nullptr);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_LABEL_SPREADING_H_
