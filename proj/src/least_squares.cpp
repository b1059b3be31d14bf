#include "btcmine/least_squares.hpp"

#include <cmath>
#include <string>

#include "btcmine/error.hpp"
#include "btcmine/kernels.hpp"

namespace btcmine::stats {

LeastSquaresFit fit_least_squares(DesignMatrix x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  require(y.size() == n, "least squares: response length does not match design rows");
  require(k >= 1 && n > k, "least squares: need more rows than columns");

  std::vector<double> scale(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto c = x.column(j);
    const double norm = std::sqrt(kernels::dot(c, c));
    if (!(norm > 0.0) || !std::isfinite(norm))
      fail(ErrorCode::collinear_lags,
           "collinear lags: design column " + std::to_string(j) + " is zero or non-finite");
    scale[j] = norm;
    for (double& v : c) v /= norm;
  }

  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> diag(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto v = x.column(j).subspan(j);
    const double norm = std::sqrt(kernels::dot(v, v));
    if (norm < kCollinearityTolerance)
      fail(ErrorCode::collinear_lags, "collinear lags: design column " + std::to_string(j) +
                                          " is a linear combination of earlier columns");
    const double alpha = v[0] > 0.0 ? -norm : norm;
    v[0] -= alpha;
    const double vnorm2 = kernels::dot(v, v);
    // Reflect the remaining columns and the response: c -= (2 v.c / v.v) v.
    for (std::size_t m = j + 1; m < k; ++m) {
      auto c = x.column(m).subspan(j);
      kernels::axpy(-2.0 * kernels::dot(v, c) / vnorm2, v, c);
    }
    std::span<double> r(qty.data() + j, n - j);
    kernels::axpy(-2.0 * kernels::dot(v, r) / vnorm2, v, r);
    diag[j] = alpha;
  }

  LeastSquaresFit fit;
  fit.coefficients.assign(k, 0.0);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t m = jj + 1; m < k; ++m) s -= x(jj, m) * fit.coefficients[m];
    fit.coefficients[jj] = s / diag[jj];
  }
  for (std::size_t j = 0; j < k; ++j) fit.coefficients[j] /= scale[j];

  std::span<const double> tail(qty.data() + k, n - k);
  fit.rss = kernels::dot(tail, tail);
  return fit;
}

}  // namespace btcmine::stats
