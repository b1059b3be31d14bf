#pragma once
// Daily price / hash-rate series: ingestion, period segmentation, and the
// change, correlation, lead-lag and Granger statistics run over them.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btcmine/date.hpp"
#include "btcmine/protocol.hpp"
#include "btcmine/stats.hpp"

namespace btcmine::empirics {

enum class GapPolicy { reject, forward_fill, linear };

GapPolicy parse_gap_policy(const std::string& text);
std::string to_string(GapPolicy policy);

struct Observation {
  Date date;
  double price = 0.0;     // $ per BTC
  double hashrate = 0.0;  // EH/s
};

struct ObservationSeries {
  std::vector<Observation> rows;  // one per calendar day, strictly increasing
  std::string source;
  GapPolicy gap_policy = GapPolicy::reject;
  std::size_t gaps_filled = 0;

  std::vector<double> prices() const;
  std::vector<double> hashrates() const;
  std::optional<std::size_t> index_of(Date date) const;
  /// Index of `date`; throws Error(missing_date) naming it when absent.
  std::size_t require_index(Date date) const;
  /// Half-open row range [first, last) with from <= date <= to.
  std::pair<std::size_t, std::size_t> range(Date from, Date to) const;
};

/// Reads `date,price_usd,hashrate_ehs`. Row errors are collected and reported
/// together with their 1-based line numbers as Error(data_error).
ObservationSeries ingest(std::istream& in, GapPolicy policy, std::string source = "<stream>");
ObservationSeries ingest(const std::filesystem::path& file, GapPolicy policy);

/// Writes a series back out in the ingest schema.
void write_series_csv(std::ostream& out, const ObservationSeries& series);

struct Segment {
  Date start;
  Date end;  // shared with the next segment's start
  std::string label;
};

struct PeriodSegmentation {
  std::vector<Date> boundaries;  // strictly inside the series range
  std::vector<Segment> segments;
  std::vector<Date> peaks;       // major peaks of smoothed log price
};

/// Smoothed log price: centered moving average of `window` days, truncated
/// at the series ends.
std::vector<double> smoothed_log_price(const ObservationSeries& series, int window);

/// A major peak is a day whose smoothed log price is the maximum within
/// +-min_segment days (the first such day on a plateau). Boundaries are the
/// smoothed-log-price minima between successive major peaks.
PeriodSegmentation segment(const ObservationSeries& series, int smoothing_window = 7,
                           int min_segment = 180);

enum class Column { price, hashrate };

/// 100 * (v_to - v_from) / v_from.
double pct_change(const ObservationSeries& series, Column column, Date from, Date to);

/// Pearson correlation of price and hash-rate levels over [from, to].
double correlation(const ObservationSeries& series, Date from, Date to);
/// Same window, on daily log changes.
double log_change_correlation(const ObservationSeries& series, Date from, Date to);

enum class CorrelationBasis { levels, log_changes };

/// corr(price[t], hashrate[t + lag]); positive best_lag means price leads.
stats::CrossCorrelation cross_correlation(const ObservationSeries& series, int max_lag,
                                          CorrelationBasis basis);

enum class GrangerDirection { price_to_hash, hash_to_price };

struct GrangerResult {
  double f = 0.0;
  double p = 1.0;
  int df_num = 0;
  int df_den = 0;
  double rss_restricted = 0.0;
  double rss_unrestricted = 0.0;
  std::size_t observations = 0;
};

/// Granger F-test on already-stationary series: regress target[t] on an
/// intercept and target[t-1..t-lags] (restricted), then add
/// source[t-1..t-lags] (unrestricted).
///   F = ((RSS_r - RSS_u) / lags) / (RSS_u / (N - 2 lags - 1))
/// with N = target.size() - lags usable rows. A restricted fit that is exact
/// to rounding gives F = 0, p = 1.
GrangerResult granger_test(std::span<const double> target, std::span<const double> source,
                           int lags);

/// Log-differences both columns, then tests whether the source column's lags
/// improve prediction of the target's. Requires rows > 3 * lags + 10.
GrangerResult granger_test(const ObservationSeries& series, GrangerDirection direction,
                           int lags = 7);

/// Mainnet block reward in force on a calendar day (halving-date aware).
double reward_on_date(Date date, const protocol::IssuanceSchedule& schedule = protocol::kMainnet);

/// Exahashes expended per coin on each day, from the day's hash rate and reward.
std::vector<double> hashes_per_bitcoin_by_date(const ObservationSeries& series);

}  // namespace btcmine::empirics
