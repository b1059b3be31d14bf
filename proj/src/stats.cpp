#include "btcmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "btcmine/error.hpp"
#include "btcmine/kernels.hpp"

namespace btcmine::stats {

namespace {

bool constant(std::span<const double> x) {
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo == *hi;
}

}  // namespace

double mean(std::span<const double> x) {
  require(!x.empty(), "mean of an empty series");
  return kernels::sum(x) / static_cast<double>(x.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "pearson: length mismatch");
  require(x.size() >= 2, "pearson: need at least two points");
  if (constant(x) || constant(y))
    fail(ErrorCode::degenerate_series, "degenerate series: zero variance");
  const double mx = mean(x);
  const double my = mean(y);
  const double sxy = kernels::centered_dot(x, y, mx, my);
  const double sxx = kernels::centered_dot(x, x, mx, mx);
  const double syy = kernels::centered_dot(y, y, my, my);
  if (!(sxx > 0.0) || !(syy > 0.0))
    fail(ErrorCode::degenerate_series, "degenerate series: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CrossCorrelation cross_correlate(std::span<const double> x, std::span<const double> y,
                                 int max_lag) {
  require(max_lag >= 0, "max_lag must be >= 0");
  require(x.size() == y.size(), "cross-correlation: length mismatch");
  const std::size_t n = x.size();
  if (n <= 2 * static_cast<std::size_t>(max_lag) + 2)
    fail(ErrorCode::series_too_short,
         "cross-correlation needs more than 2*max_lag+2 = " + std::to_string(2 * max_lag + 2) +
             " points, got " + std::to_string(n));
  if (constant(x) || constant(y))
    fail(ErrorCode::degenerate_series, "degenerate series: zero variance");

  CrossCorrelation out;
  out.table.reserve(2 * static_cast<std::size_t>(max_lag) + 1);
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const std::size_t shift = static_cast<std::size_t>(std::abs(lag));
    const std::size_t len = n - shift;
    auto xs = lag >= 0 ? x.subspan(0, len) : x.subspan(shift, len);
    auto ys = lag >= 0 ? y.subspan(shift, len) : y.subspan(0, len);
    out.table.push_back({lag, pearson(xs, ys)});
  }

  // Visit 0, +1, -1, +2, -2, ... so strict improvement implements the tie rule.
  const auto at = [&](int lag) { return out.table[static_cast<std::size_t>(lag + max_lag)].corr; };
  out.best_lag = 0;
  out.best_corr = at(0);
  for (int k = 1; k <= max_lag; ++k) {
    for (int lag : {k, -k}) {
      if (std::abs(at(lag)) > std::abs(out.best_corr)) {
        out.best_lag = lag;
        out.best_corr = at(lag);
      }
    }
  }
  return out;
}

std::vector<double> diff(std::span<const double> x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

std::vector<double> log_diff(std::span<const double> x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0))
      fail(ErrorCode::data_error,
           "log change undefined: non-positive value at index " + std::to_string(i));
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(std::log(x[i]) - std::log(x[i - 1]));
  return d;
}

}  // namespace btcmine::stats
