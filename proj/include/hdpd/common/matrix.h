#ifndef HDPD_COMMON_MATRIX_H_
#define HDPD_COMMON_MATRIX_H_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace hdpd {

// Missing values inside numeric matrices are quiet NaNs.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool IsMissing(double v) { return std::isnan(v); }

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void AppendRow(std::span<const double> row);

  // Copy of the listed rows, in the given order.
  Matrix SelectRows(std::span<const std::size_t> rows) const;
  // Copy of the listed columns, in the given order.
  Matrix SelectCols(std::span<const std::size_t> cols) const;

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Median with the lower of the two middle values for even counts. Missing
// values are ignored; returns kMissing when nothing remains.
double LowerMedian(std::vector<double> values);

}  // namespace hdpd

#endif  // HDPD_COMMON_MATRIX_H_
