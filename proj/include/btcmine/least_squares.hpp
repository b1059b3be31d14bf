#pragma once
// Ordinary least squares by Householder QR on a column-major design matrix.

#include <cstddef>
#include <span>
#include <vector>

namespace btcmine::stats {

class DesignMatrix {
 public:
  DesignMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> column(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct LeastSquaresFit {
  std::vector<double> coefficients;
  double rss = 0.0;  // residual sum of squares
};

/// Columns are scaled to unit norm before factorisation; a column whose
/// component orthogonal to the preceding ones falls below
/// kCollinearityTolerance is reported as Error(collinear_lags).
inline constexpr double kCollinearityTolerance = 1e-10;

LeastSquaresFit fit_least_squares(DesignMatrix x, std::span<const double> y);

}  // namespace btcmine::stats
