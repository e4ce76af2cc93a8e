#include "hdpd/diagram/ward.h"

#include <cmath>
#include <limits>

#include "hdpd/common/error.h"

namespace hdpd::diagram {

Dendrogram WardCluster(const Matrix& rows) {
  const std::size_t n = rows.rows();
  if (n < 2) throw InvalidArgument("clustering needs at least two rows");
  for (const double v : rows.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("clustering input must be finite");
  }
  // Working distances indexed by slot; slot i holds cluster `id[i]`.
  Matrix dist(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < rows.cols(); ++c) {
        const double d = rows(i, c) - rows(j, c);
        sq += d * d;
      }
      dist(i, j) = dist(j, i) = std::sqrt(sq);
    }
  }
  std::vector<std::size_t> id(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) id[i] = i;

  Dendrogram out;
  std::vector<std::size_t> left(n - 1);
  std::vector<std::size_t> right(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n;
    std::size_t bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double d = dist(i, j);
        const std::size_t lo = std::min(id[i], id[j]);
        const std::size_t hi = std::max(id[i], id[j]);
        bool better = bi == n || d < best;
        if (!better && d == best) {
          const std::size_t blo = std::min(id[bi], id[bj]);
          const std::size_t bhi = std::max(id[bi], id[bj]);
          better = lo < blo || (lo == blo && hi < bhi);
        }
        if (better) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double nk = static_cast<double>(size[k]);
      const double dik = dist(bi, k);
      const double djk = dist(bj, k);
      const double v = ((ni + nk) * dik * dik + (nj + nk) * djk * djk - nk * best * best) /
                       (ni + nj + nk);
      dist(bi, k) = dist(k, bi) = std::sqrt(std::max(v, 0.0));
    }
    Merge m;
    m.a = std::min(id[bi], id[bj]);
    m.b = std::max(id[bi], id[bj]);
    m.height = best;
    m.size = size[bi] + size[bj];
    out.merges.push_back(m);
    left[step] = m.a;
    right[step] = m.b;
    id[bi] = n + step;
    size[bi] = m.size;
    alive[bj] = false;
  }

  // Depth-first leaf order from the root, smaller id first.
  std::vector<std::size_t> stack{2 * n - 2};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    if (c < n) {
      out.order.push_back(c);
    } else {
      stack.push_back(right[c - n]);
      stack.push_back(left[c - n]);
    }
  }
  return out;
}

}  // namespace hdpd::diagram
