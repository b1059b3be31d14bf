#pragma once
// Correlation statistics over contiguous double arrays.

#include <span>
#include <vector>

namespace btcmine::stats {

double mean(std::span<const double> x);

/// Pearson correlation clamped to [-1, 1].
/// Throws Error(degenerate_series) if either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct LagCorrelation {
  int lag = 0;
  double corr = 0.0;
};

struct CrossCorrelation {
  std::vector<LagCorrelation> table;  // lags -max_lag..max_lag ascending
  int best_lag = 0;
  double best_corr = 0.0;
};

/// corr(x[t], y[t + lag]) over the overlapping window for each lag in
/// [-max_lag, max_lag]. Positive lag means x leads y. best_lag maximises
/// |corr|; ties go to the smaller |lag|, then to the positive lag.
/// Requires x.size() == y.size() > 2 * max_lag + 2.
CrossCorrelation cross_correlate(std::span<const double> x, std::span<const double> y,
                                 int max_lag);

/// x[t+1] - x[t].
std::vector<double> diff(std::span<const double> x);
/// log x[t+1] - log x[t]; throws Error(data_error) on non-positive values.
std::vector<double> log_diff(std::span<const double> x);

}  // namespace btcmine::stats
