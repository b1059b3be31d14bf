#include "btcmine/empirics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include "btcmine/error.hpp"
#include "btcmine/fdist.hpp"
#include "btcmine/kernels.hpp"
#include "btcmine/least_squares.hpp"

namespace btcmine::empirics {

namespace {

constexpr std::string_view kHeader = "date,price_usd,hashrate_ehs";
constexpr std::size_t kMaxReportedErrors = 20;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void report(const std::string& source, const std::vector<std::string>& errors) {
  std::ostringstream msg;
  msg << source << ": " << errors.size() << " invalid row(s)";
  for (std::size_t i = 0; i < errors.size() && i < kMaxReportedErrors; ++i)
    msg << "\n  " << errors[i];
  if (errors.size() > kMaxReportedErrors)
    msg << "\n  ... " << errors.size() - kMaxReportedErrors << " more";
  fail(ErrorCode::data_error, msg.str());
}

// Mainnet halving days (first block of each new epoch).
constexpr std::array<std::chrono::year_month_day, 4> kHalvingDays{{
    {std::chrono::year{2012}, std::chrono::November, std::chrono::day{28}},
    {std::chrono::year{2016}, std::chrono::July, std::chrono::day{9}},
    {std::chrono::year{2020}, std::chrono::May, std::chrono::day{11}},
    {std::chrono::year{2024}, std::chrono::April, std::chrono::day{20}},
}};

std::vector<double> slice(const std::vector<double>& v, std::size_t first, std::size_t last) {
  return {v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last)};
}

}  // namespace

GapPolicy parse_gap_policy(const std::string& text) {
  if (text == "reject") return GapPolicy::reject;
  if (text == "forward_fill") return GapPolicy::forward_fill;
  if (text == "linear") return GapPolicy::linear;
  fail(ErrorCode::invalid_argument,
       "unknown gap policy '" + text + "' (want reject, forward_fill or linear)");
}

std::string to_string(GapPolicy policy) {
  switch (policy) {
    case GapPolicy::reject:
      return "reject";
    case GapPolicy::forward_fill:
      return "forward_fill";
    case GapPolicy::linear:
      return "linear";
  }
  return "reject";
}

std::vector<double> ObservationSeries::prices() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.price);
  return v;
}

std::vector<double> ObservationSeries::hashrates() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.hashrate);
  return v;
}

std::optional<std::size_t> ObservationSeries::index_of(Date date) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), date,
                             [](const Observation& o, Date d) { return o.date < d; });
  if (it == rows.end() || it->date != date) return std::nullopt;
  return static_cast<std::size_t>(it - rows.begin());
}

std::size_t ObservationSeries::require_index(Date date) const {
  auto i = index_of(date);
  if (!i) fail(ErrorCode::missing_date, "date " + btcmine::to_string(date) + " is not in the series");
  return *i;
}

std::pair<std::size_t, std::size_t> ObservationSeries::range(Date from, Date to) const {
  auto lo = std::lower_bound(rows.begin(), rows.end(), from,
                             [](const Observation& o, Date d) { return o.date < d; });
  auto hi = std::upper_bound(rows.begin(), rows.end(), to,
                             [](Date d, const Observation& o) { return d < o.date; });
  if (hi < lo) hi = lo;
  return {static_cast<std::size_t>(lo - rows.begin()), static_cast<std::size_t>(hi - rows.begin())};
}

ObservationSeries ingest(std::istream& in, GapPolicy policy, std::string source) {
  ObservationSeries series;
  series.source = std::move(source);
  series.gap_policy = policy;

  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t last_line = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    view = trim(view);
    if (!have_header) {
      if (view != kHeader)
        fail(ErrorCode::data_error, series.source + ": line 1: expected header '" +
                                        std::string(kHeader) + "', got '" + std::string(view) + "'");
      have_header = true;
      continue;
    }
    if (view.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::array<std::string_view, 3> fields;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view f = view.substr(start, comma == std::string_view::npos ? view.npos : comma - start);
      if (count < fields.size()) fields[count] = trim(f);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 3) {
      errors.push_back(where + "expected 3 fields, got " + std::to_string(count));
      continue;
    }
    const auto date = parse_date(fields[0]);
    const auto price = parse_number(fields[1]);
    const auto hash = parse_number(fields[2]);
    if (!date) {
      errors.push_back(where + "unparseable date '" + std::string(fields[0]) + "'");
      continue;
    }
    if (!price || !std::isfinite(*price)) {
      errors.push_back(where + "unparseable price '" + std::string(fields[1]) + "'");
      continue;
    }
    if (!hash || !std::isfinite(*hash)) {
      errors.push_back(where + "unparseable hash rate '" + std::string(fields[2]) + "'");
      continue;
    }
    if (!(*price > 0.0)) {
      errors.push_back(where + "price must be > 0, got " + std::string(fields[1]));
      continue;
    }
    if (*hash < 0.0) {
      errors.push_back(where + "hash rate must be >= 0, got " + std::string(fields[2]));
      continue;
    }
    if (!series.rows.empty()) {
      const Observation prev = series.rows.back();
      const long gap = days_between(prev.date, *date);
      if (gap <= 0) {
        errors.push_back(where + "date " + btcmine::to_string(*date) +
                         " does not increase on line " + std::to_string(last_line) + "'s " +
                         btcmine::to_string(prev.date));
        continue;
      }
      if (gap > 1) {
        if (policy == GapPolicy::reject) {
          errors.push_back(where + std::to_string(gap - 1) + " missing day(s) after " +
                           btcmine::to_string(prev.date));
        } else {
          for (long k = 1; k < gap; ++k) {
            Observation fill{prev.date + std::chrono::days{k}, prev.price, prev.hashrate};
            if (policy == GapPolicy::linear) {
              const double w = static_cast<double>(k) / static_cast<double>(gap);
              fill.price = prev.price + w * (*price - prev.price);
              fill.hashrate = prev.hashrate + w * (*hash - prev.hashrate);
            }
            series.rows.push_back(fill);
            ++series.gaps_filled;
          }
        }
      }
    }
    series.rows.push_back({*date, *price, *hash});
    last_line = line_no;
  }

  if (!have_header) fail(ErrorCode::data_error, series.source + ": empty file (no header)");
  if (!errors.empty()) report(series.source, errors);
  if (series.rows.empty()) fail(ErrorCode::data_error, series.source + ": no data rows");
  return series;
}

ObservationSeries ingest(const std::filesystem::path& file, GapPolicy policy) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::data_error, "cannot open '" + file.string() + "'");
  return ingest(in, policy, file.string());
}

void write_series_csv(std::ostream& out, const ObservationSeries& series) {
  out << kHeader << '\n';
  char buf[64];
  for (const auto& r : series.rows) {
    out << btcmine::to_string(r.date) << ',';
    auto p = std::to_chars(buf, buf + sizeof buf, r.price).ptr;
    out.write(buf, p - buf);
    out << ',';
    p = std::to_chars(buf, buf + sizeof buf, r.hashrate).ptr;
    out.write(buf, p - buf);
    out << '\n';
  }
}

std::vector<double> smoothed_log_price(const ObservationSeries& series, int window) {
  require(window >= 1, "smoothing window must be >= 1");
  const std::size_t n = series.rows.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::log(series.rows[i].price);
  const std::size_t left = static_cast<std::size_t>(window - 1) / 2;
  const std::size_t right = static_cast<std::size_t>(window) / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n, i + right + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

PeriodSegmentation segment(const ObservationSeries& series, int smoothing_window, int min_segment) {
  require(min_segment >= 1, "min_segment must be >= 1");
  const std::size_t n = series.rows.size();
  const std::size_t reach = static_cast<std::size_t>(min_segment);
  if (n <= 2 * reach)
    fail(ErrorCode::series_too_short, "segmentation needs more than 2*min_segment = " +
                                          std::to_string(2 * reach) + " days, got " +
                                          std::to_string(n));
  const std::vector<double> s = smoothed_log_price(series, smoothing_window);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= reach ? i - reach : 0;
    const std::size_t hi = std::min(n - 1, i + reach);
    bool major = true;
    for (std::size_t j = lo; j <= hi && major; ++j) {
      if (j < i && s[j] >= s[i]) major = false;
      if (j > i && s[j] > s[i]) major = false;
    }
    if (major) peaks.push_back(i);
  }

  PeriodSegmentation out;
  for (std::size_t p : peaks) out.peaks.push_back(series.rows[p].date);
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const std::size_t a = peaks[k - 1];
    const std::size_t b = peaks[k];
    std::size_t best = a + 1;
    for (std::size_t j = a + 1; j < b; ++j)
      if (s[j] < s[best]) best = j;
    if (best < b && s[best] < s[a] && s[best] < s[b] && best > 0 && best + 1 < n)
      out.boundaries.push_back(series.rows[best].date);
  }

  Date start = series.rows.front().date;
  for (std::size_t k = 0; k <= out.boundaries.size(); ++k) {
    const Date end = k < out.boundaries.size() ? out.boundaries[k] : series.rows.back().date;
    out.segments.push_back({start, end, "Period " + std::to_string(k + 1)});
    start = end;
  }
  return out;
}

double pct_change(const ObservationSeries& series, Column column, Date from, Date to) {
  const auto& a = series.rows[series.require_index(from)];
  const auto& b = series.rows[series.require_index(to)];
  const double va = column == Column::price ? a.price : a.hashrate;
  const double vb = column == Column::price ? b.price : b.hashrate;
  if (va == 0.0)
    fail(ErrorCode::degenerate_series,
         "percent change from a zero value on " + btcmine::to_string(from));
  return 100.0 * (vb - va) / va;
}

double correlation(const ObservationSeries& series, Date from, Date to) {
  auto [first, last] = series.range(from, to);
  if (last - first < 3)
    fail(ErrorCode::series_too_short, "correlation needs at least 3 rows in " +
                                          btcmine::to_string(from) + ".." + btcmine::to_string(to));
  const auto p = slice(series.prices(), first, last);
  const auto h = slice(series.hashrates(), first, last);
  try {
    return stats::pearson(p, h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_series)
      fail(ErrorCode::degenerate_series, "degenerate segment: zero variance in " +
                                             btcmine::to_string(from) + ".." + btcmine::to_string(to));
    throw;
  }
}

double log_change_correlation(const ObservationSeries& series, Date from, Date to) {
  auto [first, last] = series.range(from, to);
  if (last - first < 4)
    fail(ErrorCode::series_too_short, "log-change correlation needs at least 4 rows");
  const auto p = stats::log_diff(slice(series.prices(), first, last));
  const auto h = stats::log_diff(slice(series.hashrates(), first, last));
  return stats::pearson(p, h);
}

stats::CrossCorrelation cross_correlation(const ObservationSeries& series, int max_lag,
                                          CorrelationBasis basis) {
  if (basis == CorrelationBasis::levels)
    return stats::cross_correlate(series.prices(), series.hashrates(), max_lag);
  return stats::cross_correlate(stats::log_diff(series.prices()),
                                stats::log_diff(series.hashrates()), max_lag);
}

GrangerResult granger_test(std::span<const double> target, std::span<const double> source,
                           int lags) {
  require(lags >= 1, "granger lags must be >= 1");
  require(target.size() == source.size(), "granger: series lengths differ");
  const std::size_t L = static_cast<std::size_t>(lags);
  const std::size_t T = target.size();
  if (T <= 3 * L + 1)
    fail(ErrorCode::series_too_short, "granger test needs more than 3*lags+1 observations");
  const std::size_t N = T - L;

  stats::DesignMatrix restricted(N, 1 + L);
  stats::DesignMatrix unrestricted(N, 1 + 2 * L);
  std::vector<double> y(target.begin() + static_cast<std::ptrdiff_t>(L), target.end());
  for (std::size_t r = 0; r < N; ++r) {
    const std::size_t t = r + L;
    restricted(r, 0) = 1.0;
    unrestricted(r, 0) = 1.0;
    for (std::size_t k = 1; k <= L; ++k) {
      restricted(r, k) = target[t - k];
      unrestricted(r, k) = target[t - k];
      unrestricted(r, L + k) = source[t - k];
    }
  }

  GrangerResult out;
  out.observations = N;
  out.df_num = lags;
  out.df_den = static_cast<int>(N - 2 * L - 1);
  out.rss_restricted = stats::fit_least_squares(std::move(restricted), y).rss;
  out.rss_unrestricted = stats::fit_least_squares(std::move(unrestricted), y).rss;

  const double my = stats::mean(y);
  const double tss = kernels::centered_dot(y, y, my, my);
  if (out.rss_restricted <= 1e-20 * tss) {
    out.f = 0.0;
    out.p = 1.0;
    return out;
  }
  const double gain = std::max(out.rss_restricted - out.rss_unrestricted, 0.0);
  if (out.rss_unrestricted <= 0.0) {
    out.f = std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.f = (gain / out.df_num) / (out.rss_unrestricted / out.df_den);
  out.p = stats::f_upper_tail(out.f, out.df_num, out.df_den);
  return out;
}

GrangerResult granger_test(const ObservationSeries& series, GrangerDirection direction, int lags) {
  require(lags >= 1, "granger lags must be >= 1");
  if (series.rows.size() <= 3 * static_cast<std::size_t>(lags) + 10)
    fail(ErrorCode::series_too_short, "granger test needs more than 3*lags+10 = " +
                                          std::to_string(3 * lags + 10) + " rows, got " +
                                          std::to_string(series.rows.size()));
  const auto dp = stats::log_diff(series.prices());
  const auto dh = stats::log_diff(series.hashrates());
  return direction == GrangerDirection::price_to_hash ? granger_test(dh, dp, lags)
                                                      : granger_test(dp, dh, lags);
}

double reward_on_date(Date date, const protocol::IssuanceSchedule& schedule) {
  std::uint64_t epoch = 0;
  for (const auto& d : kHalvingDays)
    if (Date{d} <= date) ++epoch;
  return protocol::reward_for_epoch(schedule, epoch);
}

std::vector<double> hashes_per_bitcoin_by_date(const ObservationSeries& series) {
  std::vector<double> out;
  out.reserve(series.rows.size());
  for (const auto& r : series.rows)
    out.push_back(protocol::hashes_per_bitcoin(protocol::HashRate{r.hashrate},
                                               reward_on_date(r.date),
                                               protocol::kMainnet.block_time));
  return out;
}

}  // namespace btcmine::empirics
