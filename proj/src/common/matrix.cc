#include "hdpd/common/matrix.h"

#include <algorithm>
#include <stdexcept>

#include "hdpd/common/error.h"

namespace hdpd {

void Matrix::AppendRow(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_) {
    throw InvalidArgument("row width " + std::to_string(row.size()) +
                          " does not match matrix width " +
                          std::to_string(cols_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
}

Matrix Matrix::SelectRows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = Row(rows[i]);
    std::copy(src.begin(), src.end(), out.Row(i).begin());
  }
  return out;
}

Matrix Matrix::SelectCols(std::span<const std::size_t> cols) const {
  Matrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(r, j) = (*this)(r, cols[j]);
    }
  }
  return out;
}

double LowerMedian(std::vector<double> values) {
  std::erase_if(values, [](double v) { return IsMissing(v); });
  if (values.empty()) return kMissing;
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

}  // namespace hdpd
