#include "hdpd/diagram/label_spreading.h"

#include <algorithm>
#include <cmath>

#include "hdpd/common/error.h"

namespace hdpd::diagram {

Matrix GridAffinity(std::size_t nx, std::size_t ny, double gamma) {
  if (nx == 0 || ny == 0) throw InvalidArgument("empty grid");
  if (!(gamma > 0.0)) throw InvalidArgument("kernel scale must be positive");
  const std::size_t n = nx * ny;
  auto coord = [](std::size_t i, std::size_t size) {
    return size > 1 ? static_cast<double>(i) / static_cast<double>(size - 1) : 0.0;
  };
  Matrix w(n, n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const double xa = coord(a % nx, nx);
    const double ya = coord(a / nx, ny);
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = xa - coord(b % nx, nx);
      const double dy = ya - coord(b / nx, ny);
      const double v = std::exp(-gamma * (dx * dx + dy * dy));
      w(a, b) = v;
      w(b, a) = v;
    }
  }
  return w;
}

Matrix SymmetricNormalize(const Matrix& w) {
  if (w.rows() != w.cols()) throw InvalidArgument("affinity must be square");
  const std::size_t n = w.rows();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += w(i, j);
    inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix s(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = inv_sqrt[i] * w(i, j) * inv_sqrt[j];
  }
  return s;
}

SpreadingResult LabelSpreading(const Matrix& s, std::span<const int> labels, int classes,
                               const SpreadingOptions& options, const Matrix* warm_start) {
  const std::size_t n = s.rows();
  if (s.cols() != n || labels.size() != n) throw InvalidArgument("graph and labels differ in size");
  if (classes < 1) throw InvalidArgument("need at least one class");
  if (!(options.alpha >= 0.0 && options.alpha < 1.0)) {
    throw InvalidArgument("clamping factor must lie in [0, 1)");
  }
  const auto k = static_cast<std::size_t>(classes);
  Matrix y(n, k, 0.0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0) continue;
    if (labels[i] >= classes) throw InvalidArgument("label outside the class range");
    y(i, static_cast<std::size_t>(labels[i])) = 1.0;
    any = true;
  }
  if (!any) throw InvalidArgument("label spreading needs at least one labelled node");

  SpreadingResult result;
  Matrix f = y;
  if (warm_start != nullptr && warm_start->rows() == n && warm_start->cols() == k) f = *warm_start;
  Matrix next(n, k, 0.0);
  const double alpha = options.alpha;
  for (int it = 1; it <= options.max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto srow = s.Row(i);
      for (std::size_t c = 0; c < k; ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += srow[j] * f(j, c);
        const double v = alpha * acc + (1.0 - alpha) * y(i, c);
        change = std::max(change, std::abs(v - f(i, c)));
        next(i, c) = v;
      }
    }
    std::swap(f, next);
    result.iterations = it;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.posterior = Matrix(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) total += f(i, c);
    for (std::size_t c = 0; c < k; ++c) {
      result.posterior(i, c) = total > 0.0 ? f(i, c) / total : 1.0 / static_cast<double>(k);
    }
  }
  result.scores = std::move(f);
  return result;
}

}  // namespace hdpd::diagram
