#include "btcmine/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "btcmine/empirics.hpp"
#include "btcmine/error.hpp"
#include "btcmine/miner_econ.hpp"
#include "btcmine/protocol.hpp"
#include "btcmine/scenario_io.hpp"
#include "btcmine/simulator.hpp"

namespace btcmine::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kConvergenceTolerance = 1e-9;  // |EX| / revenue
constexpr int kDefaultProbeLag = 144;

struct CalcArgs {
  double hashrate = 204.0;
  double price = 37150.0;
  double share = 0.01;
  double reward = 6.25;
  double block_time = 600.0;
  std::uint64_t periods = 144;
  bool json = false;
};

struct SimulateArgs {
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  bool allow_divergent = false;
};

struct AnalyzeArgs {
  std::string input;
  std::string out_dir;
  std::string gap_policy = "reject";
  int window = 7;
  int min_segment = 180;
  int max_lag = 60;
  int granger_lags = 7;
  std::vector<std::string> windows;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::divergent_config:
    case ErrorCode::post_issuance:
      return kModelRefusal;
    default:
      return kDataError;
  }
}

std::string format_quantity(double v) {
  if (v == std::floor(v)) return econ::format_grouped(v, 0);
  std::string s = econ::format_grouped(v, 6);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string lead_lag_verdict(int best_lag) {
  if (best_lag > 0) return "price_leads";
  if (best_lag < 0) return "hash_leads";
  return "contemporaneous";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorCode::data_error, "output directory '" + dir.string() + "' is not writable");
}

// ---------------------------------------------------------------- calc

int cmd_calc(const CalcArgs& a, std::ostream& out) {
  const double hpb =
      protocol::hashes_per_bitcoin(protocol::HashRate{a.hashrate}, a.reward, a.block_time);
  const econ::MinerPosition pos{a.share, 0.0};
  const double per_block = econ::expected_revenue(pos, a.price, a.reward, 1);
  const double per_day = econ::expected_revenue(pos, a.price, a.reward, a.periods);

  if (a.json) {
    ordered_json j;
    j["hashrate_ehs"] = a.hashrate;
    j["block_reward_btc"] = a.reward;
    j["block_time_s"] = a.block_time;
    j["price_usd"] = a.price;
    j["hash_share"] = a.share;
    j["hashes_per_bitcoin_eh"] = hpb;
    j["expected_revenue_per_block_usd"] = per_block;
    j["periods_per_day"] = a.periods;
    j["expected_revenue_per_day_usd"] = per_day;
    out << j.dump(2) << '\n';
    return kOk;
  }

  auto line = [&](const std::string& label, const std::string& value) {
    out << std::left << std::setw(28) << label << value << '\n';
  };
  std::ostringstream share;
  share << a.share * 100.0 << '%';
  line("hash rate", format_quantity(a.hashrate) + " EH/s");
  line("block reward", format_quantity(a.reward) + " BTC");
  line("block time", format_quantity(a.block_time) + " s");
  line("price", econ::format_usd(a.price) + "/BTC");
  line("hash share", share.str());
  line("hashes per bitcoin", format_quantity(hpb) + " EH/BTC");
  line("expected revenue / block", econ::format_usd(per_block));
  line("expected revenue / day", econ::format_usd(per_day) + "/day");
  return kOk;
}

// ------------------------------------------------------------ simulate

ordered_json simulation_summary(const io::ScenarioDocument& doc, const sim::SimOutput& output) {
  const sim::Scenario& sc = doc.scenario;
  const auto& rows = output.rows;
  const sim::SimRow& last = rows.back();

  ordered_json j;
  j["horizon"] = sc.horizon;
  j["aggregation"] = sc.aggregation;
  j["seed"] = sc.seed;
  j["stability_product"] = sc.params.stability_product();
  j["final_price"] = last.price;
  j["final_total_hashes"] = last.total_hashes;
  j["final_excess_profit"] = last.excess_profit;
  j["final_equilibrium_hashes"] = econ::equilibrium_hashes(last.price, last.fee, last.reward, last.el);

  // First period from which |EX| stays within tolerance of revenue to the end.
  std::optional<std::uint64_t> converged;
  for (std::size_t i = rows.size(); i-- > 0;) {
    const double scale = std::max(std::abs(rows[i].revenue), 1.0);
    if (std::abs(rows[i].excess_profit) > kConvergenceTolerance * scale) break;
    converged = rows[i].period;
  }
  j["convergence_period"] = converged ? ordered_json(*converged) : ordered_json(nullptr);

  std::size_t clamps = 0;
  for (const auto& r : rows) clamps += r.clamped ? 1 : 0;
  j["clamp_events"] = clamps;
  j["coins_issued"] = output.coins_issued();

  ordered_json halvings = ordered_json::array();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].reward == rows[i - 1].reward) continue;
    ordered_json h;
    h["period"] = rows[i].period;
    h["reward_before"] = rows[i - 1].reward;
    h["reward_after"] = rows[i].reward;
    h["hashes_per_bitcoin_before"] = rows[i - 1].hashes_per_bitcoin;
    h["hashes_per_bitcoin_after"] = rows[i].hashes_per_bitcoin;
    h["hashes_per_bitcoin_ratio"] = rows[i].hashes_per_bitcoin / rows[i - 1].hashes_per_bitcoin;
    halvings.push_back(h);
  }
  j["halvings"] = halvings;

  ordered_json ll;
  const int fit = rows.size() >= 3 ? static_cast<int>((rows.size() - 3) / 2) : 0;
  const int max_lag = std::min(doc.probe_max_lag.value_or(kDefaultProbeLag), fit);
  ll["max_lag"] = max_lag;
  try {
    const sim::LeadLag probe = sim::lead_lag_probe(output, max_lag);
    ll["best_lag"] = probe.best_lag;
    ll["correlation"] = probe.correlation;
    ll["verdict"] = lead_lag_verdict(probe.best_lag);
  } catch (const Error& e) {
    ll["best_lag"] = nullptr;
    ll["correlation"] = nullptr;
    ll["verdict"] = nullptr;
    ll["error"] = e.what();
  }
  j["lead_lag"] = ll;
  return j;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  io::ScenarioDocument doc = io::load_scenario(a.scenario);
  if (a.seed) doc.scenario.seed = *a.seed;
  if (a.horizon) doc.scenario.horizon = *a.horizon;
  if (a.allow_divergent) doc.scenario.allow_divergent = true;

  const sim::SimOutput output = sim::run(doc.scenario);
  const fs::path dir = a.out_dir;
  ensure_dir(dir);

  const auto rows = output.aggregate(doc.scenario.aggregation);
  std::ostringstream csv;
  sim::write_csv(csv, rows);
  io::write_file_atomic(dir / "trajectory.csv", csv.str());

  // Daily buckets double as an observation series for `analyze`.
  const double bucket_seconds =
      static_cast<double>(doc.scenario.aggregation) * doc.scenario.schedule.block_time;
  if (bucket_seconds == 86400.0) {
    empirics::ObservationSeries obs;
    obs.source = "simulate";
    for (std::size_t i = 0; i < rows.size(); ++i)
      obs.rows.push_back({doc.start_date + std::chrono::days{static_cast<long>(i)}, rows[i].price,
                          rows[i].total_hashes / doc.scenario.schedule.block_time});
    std::ostringstream obs_csv;
    empirics::write_series_csv(obs_csv, obs);
    io::write_file_atomic(dir / "observations.csv", obs_csv.str());
  }

  const ordered_json summary = simulation_summary(doc, output);
  io::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << '\n';
  return kOk;
}

// ------------------------------------------------------------- analyze

template <class F>
ordered_json guarded(F&& f) {
  try {
    return ordered_json(f());
  } catch (const Error& e) {
    return ordered_json(nullptr);
  }
}

ordered_json window_stats(const empirics::ObservationSeries& s, Date from, Date to) {
  ordered_json w;
  w["from"] = to_string(from);
  w["to"] = to_string(to);
  w["days"] = days_between(from, to);
  w["price_change_pct"] = guarded([&] { return empirics::pct_change(s, empirics::Column::price, from, to); });
  w["hashrate_change_pct"] =
      guarded([&] { return empirics::pct_change(s, empirics::Column::hashrate, from, to); });
  w["correlation_levels"] = guarded([&] { return empirics::correlation(s, from, to); });
  w["correlation_log_changes"] =
      guarded([&] { return empirics::log_change_correlation(s, from, to); });
  return w;
}

ordered_json granger_json(const empirics::ObservationSeries& s, empirics::GrangerDirection d,
                          int lags) {
  ordered_json g;
  try {
    const auto r = empirics::granger_test(s, d, lags);
    g["f"] = r.f;
    g["p"] = r.p;
    g["df_num"] = r.df_num;
    g["df_den"] = r.df_den;
    g["observations"] = r.observations;
  } catch (const Error& e) {
    g["error"] = e.what();
  }
  return g;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto series = empirics::ingest(fs::path(a.input), empirics::parse_gap_policy(a.gap_policy));
  const fs::path dir = a.out_dir;
  ensure_dir(dir);

  ordered_json report;
  report["source"] = series.source;
  report["rows"] = series.rows.size();
  report["first_date"] = to_string(series.rows.front().date);
  report["last_date"] = to_string(series.rows.back().date);
  report["gap_policy"] = empirics::to_string(series.gap_policy);
  report["gaps_filled"] = series.gaps_filled;

  ordered_json seg;
  seg["smoothing_window"] = a.window;
  seg["min_segment"] = a.min_segment;
  try {
    const auto s = empirics::segment(series, a.window, a.min_segment);
    ordered_json peaks = ordered_json::array(), bounds = ordered_json::array(),
                 segs = ordered_json::array();
    for (Date d : s.peaks) peaks.push_back(to_string(d));
    for (Date d : s.boundaries) bounds.push_back(to_string(d));
    for (const auto& sg : s.segments) {
      ordered_json w = window_stats(series, sg.start, sg.end);
      ordered_json entry;
      entry["label"] = sg.label;
      for (auto& [k, v] : w.items()) entry[k] = v;
      segs.push_back(entry);
    }
    seg["peaks"] = peaks;
    seg["boundaries"] = bounds;
    seg["segments"] = segs;
  } catch (const Error& e) {
    seg["error"] = e.what();
  }
  report["segmentation"] = seg;

  ordered_json windows = ordered_json::array();
  for (const std::string& spec : a.windows) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
      fail(ErrorCode::invalid_argument, "--pct-window wants FROM:TO, got '" + spec + "'");
    windows.push_back(window_stats(series, date_from_string(spec.substr(0, colon)),
                                   date_from_string(spec.substr(colon + 1))));
  }
  report["windows"] = windows;

  ordered_json cc;
  cc["max_lag"] = a.max_lag;
  std::optional<stats::CrossCorrelation> levels, changes;
  for (auto [name, basis] : {std::pair{"levels", empirics::CorrelationBasis::levels},
                             std::pair{"log_changes", empirics::CorrelationBasis::log_changes}}) {
    ordered_json entry;
    try {
      auto r = empirics::cross_correlation(series, a.max_lag, basis);
      entry["best_lag"] = r.best_lag;
      entry["correlation"] = r.best_corr;
      (basis == empirics::CorrelationBasis::levels ? levels : changes) = std::move(r);
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    cc[name] = entry;
  }
  report["cross_correlation"] = cc;
  report["lead_lag_verdict"] =
      changes ? ordered_json(lead_lag_verdict(changes->best_lag)) : ordered_json(nullptr);

  ordered_json granger;
  granger["lags"] = a.granger_lags;
  granger["price_to_hash"] =
      granger_json(series, empirics::GrangerDirection::price_to_hash, a.granger_lags);
  granger["hash_to_price"] =
      granger_json(series, empirics::GrangerDirection::hash_to_price, a.granger_lags);
  report["granger"] = granger;

  // Plot data.
  {
    const auto smooth = empirics::smoothed_log_price(series, a.window);
    std::ostringstream csv;
    csv << "date,log_price,smoothed_log_price\n" << std::setprecision(17);
    for (std::size_t i = 0; i < series.rows.size(); ++i)
      csv << to_string(series.rows[i].date) << ',' << std::log(series.rows[i].price) << ','
          << smooth[i] << '\n';
    io::write_file_atomic(dir / "log_price.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "date,price_usd,hashes_per_bitcoin\n" << std::setprecision(17);
    const auto hpb = empirics::hashes_per_bitcoin_by_date(series);
    for (std::size_t i = 0; i < series.rows.size(); ++i)
      csv << to_string(series.rows[i].date) << ',' << series.rows[i].price << ',' << hpb[i] << '\n';
    io::write_file_atomic(dir / "hashes_per_bitcoin.csv", csv.str());
  }
  if (levels || changes) {
    std::ostringstream csv;
    csv << "lag,corr_levels,corr_log_changes\n" << std::setprecision(17);
    for (int lag = -a.max_lag; lag <= a.max_lag; ++lag) {
      const auto idx = static_cast<std::size_t>(lag + a.max_lag);
      csv << lag << ',';
      if (levels) csv << levels->table[idx].corr;
      csv << ',';
      if (changes) csv << changes->table[idx].corr;
      csv << '\n';
    }
    io::write_file_atomic(dir / "cross_correlation.csv", csv.str());
  }

  io::write_file_atomic(dir / "report.json", report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bitcoin mining cost and price toolkit"};
  app.require_subcommand(1, 1);

  CalcArgs calc;
  auto* c = app.add_subcommand("calc", "hashes per bitcoin and expected miner revenue");
  c->add_option("--hashrate", calc.hashrate, "network hash rate, EH/s")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  c->add_option("--price", calc.price, "price, $/BTC")->check(CLI::NonNegativeNumber)->capture_default_str();
  c->add_option("--share", calc.share, "miner's fraction of network hashes")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  c->add_option("--reward", calc.reward, "block reward, BTC")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--block-time", calc.block_time, "seconds per block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--periods", calc.periods, "blocks per reporting day")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_flag("--json", calc.json, "print JSON instead of a table");

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "run a scenario document");
  s->add_option("--scenario", simulate.scenario, "scenario JSON file")->required();
  s->add_option("--out", simulate.out_dir, "output directory")->required();
  s->add_option("--seed", simulate.seed, "override the scenario seed");
  s->add_option("--horizon", simulate.horizon, "override the scenario horizon")
      ->check(CLI::PositiveNumber);
  s->add_flag("--allow-divergent", simulate.allow_divergent, "run even if n*el >= 2");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "segment and analyze a daily price/hash-rate CSV");
  an->add_option("--input", analyze.input, "CSV with header date,price_usd,hashrate_ehs")->required();
  an->add_option("--out", analyze.out_dir, "output directory")->required();
  an->add_option("--gap-policy", analyze.gap_policy, "reject | forward_fill | linear")
      ->check(CLI::IsMember({"reject", "forward_fill", "linear"}))
      ->capture_default_str();
  an->add_option("--window", analyze.window, "smoothing window, days")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  an->add_option("--min-segment", analyze.min_segment, "minimum spacing of major peaks, days")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  an->add_option("--max-lag", analyze.max_lag, "cross-correlation lag range, days")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  an->add_option("--granger-lags", analyze.granger_lags, "lags in the Granger regressions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  an->add_option("--pct-window", analyze.windows, "extra FROM:TO window (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return cmd_calc(calc, out);
    if (s->parsed()) return cmd_simulate(simulate, out);
    if (an->parsed()) return cmd_analyze(analyze, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace btcmine::cli
