#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "btcmine/cli.hpp"
#include "btcmine/date.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using btcmine::testing::normals;
using btcmine::testing::scratch_dir;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "btcmine");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = btcmine::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example(const char* name) { return (fs::path(BTCMINE_EXAMPLES_DIR) / name).string(); }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Daily CSV: price is a log random walk, hash rate follows it `lag` days late
// with its own noise.
std::string shifted_copy_csv(int lag, std::size_t days) {
  const auto a = normals(91, days + lag), b = normals(92, days + lag);
  std::vector<double> lp(days + lag);
  double level = std::log(5000.0);
  for (std::size_t i = 0; i < lp.size(); ++i) lp[i] = level += 0.03 * a[i];
  std::ostringstream csv;
  csv << "date,price_usd,hashrate_ehs\n" << std::setprecision(17);
  btcmine::Date d = btcmine::date_from_string("2015-01-01");
  for (std::size_t i = 0; i < days; ++i) {
    const std::size_t t = i + lag;
    csv << btcmine::to_string(d + std::chrono::days{static_cast<long>(i)}) << ',' << std::exp(lp[t]) << ','
        << std::exp(lp[t - lag] - 3.0 + 0.01 * b[t]) << '\n';
  }
  return csv.str();
}

}  // namespace

// ---------------------------------------------------------------- calc

TEST_CASE("calc reproduces the 1% miner table") {
  const auto r = run_cli({"calc", "--hashrate", "204", "--price", "37150", "--share", "0.01"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "19,584 EH/BTC"));
  CHECK(contains(r.out, "$2,321.88"));
  CHECK(contains(r.out, "$334,350.00/day"));
}

TEST_CASE("calc scales with share") {
  CHECK(contains(run_cli({"calc", "--price", "37150", "--share", "0.02"}).out, "$668,700.00/day"));
  CHECK(contains(run_cli({"calc", "--share", "0"}).out, "$0.00/day"));
}

TEST_CASE("calc JSON") {
  const auto r = run_cli({"calc", "--json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["hashes_per_bitcoin_eh"].get<double>() == 19584.0);
  CHECK(j["expected_revenue_per_block_usd"].get<double>() == 2321.875);
  CHECK(j["expected_revenue_per_day_usd"].get<double>() == 334350.0);
}

TEST_CASE("bad arguments are usage errors") {
  CHECK(run_cli({"calc", "--price", "-3"}).code == 1);
  CHECK(run_cli({"calc", "--price", "abc"}).code == 1);
  CHECK(run_cli({"calc", "--share", "1.5"}).code == 1);
  CHECK(run_cli({"calc", "--reward", "0"}).code == 1);
  CHECK(run_cli({"calc", "--bogus"}).code == 1);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"simulate"}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"calc", "--help"}).code == 0);
}

// ---------------------------------------------------------------- simulate

TEST_CASE("simulate: equilibrium start stays at zero excess profit") {
  const auto dir = scratch_dir("cli_equilibrium");
  const auto r = run_cli({"simulate", "--scenario", example("equilibrium.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "summary.json"));
  CHECK(j["final_excess_profit"].get<double>() == 0.0);
  CHECK(j["convergence_period"].get<int>() == 0);
  CHECK(j["clamp_events"].get<int>() == 0);
  CHECK(j["final_total_hashes"].get<double>() == 92875.0);
  CHECK(json::parse(r.out) == j);
  // Constant hashes leave nothing to correlate; the probe reports why.
  CHECK(j["lead_lag"]["verdict"].is_null());
  CHECK(contains(j["lead_lag"]["error"].get<std::string>(), "degenerate"));
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("period,price,total_hashes,revenue,variable_cost,excess_profit,reward,hashes_per_bitcoin,clamp_flag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 20);
  // Daily buckets also produce an observation series.
  CHECK(slurp(dir / "observations.csv").rfind("date,price_usd,hashrate_ehs\n2020-01-01,37150,", 0) == 0);
}

TEST_CASE("simulate: summary keys are frozen") {
  const auto dir = scratch_dir("cli_keys");
  REQUIRE(run_cli({"simulate", "--scenario", example("step.json"), "--out", dir.string()}).code == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(dir / "summary.json"));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"horizon", "aggregation", "seed", "stability_product", "final_price",
                                         "final_total_hashes", "final_excess_profit", "final_equilibrium_hashes",
                                         "convergence_period", "clamp_events", "coins_issued", "halvings",
                                         "lead_lag"});
  std::vector<std::string> ll;
  for (const auto& item : j["lead_lag"].items()) ll.push_back(item.key());
  CHECK(ll == std::vector<std::string>{"max_lag", "best_lag", "correlation", "verdict"});
}

TEST_CASE("simulate: step price leads hashes") {
  const auto dir = scratch_dir("cli_step");
  REQUIRE(run_cli({"simulate", "--scenario", example("step.json"), "--out", dir.string()}).code == 0);
  const auto j = json::parse(slurp(dir / "summary.json"));
  CHECK(j["lead_lag"]["best_lag"].get<int>() >= 1);
  CHECK(j["lead_lag"]["verdict"] == "price_leads");
  CHECK(j["stability_product"].get<double>() == 0.5);
}

TEST_CASE("simulate: halving doubles hashes per bitcoin") {
  const auto dir = scratch_dir("cli_halving");
  REQUIRE(run_cli({"simulate", "--scenario", example("halving.json"), "--out", dir.string()}).code == 0);
  const auto j = json::parse(slurp(dir / "summary.json"));
  REQUIRE(j["halvings"].size() == 1);
  const auto& h = j["halvings"][0];
  CHECK(h["period"].get<int>() == 1440);
  CHECK(h["reward_before"].get<double>() == 12.5);
  CHECK(h["reward_after"].get<double>() == 6.25);
  CHECK(h["hashes_per_bitcoin_ratio"].get<double>() == 2.0);
  CHECK(j["coins_issued"].get<double>() == 1440 * 12.5 + (14400 - 1440) * 6.25);
}

TEST_CASE("simulate: identical seeds give byte-identical files") {
  const auto a = scratch_dir("cli_det_a"), b = scratch_dir("cli_det_b"), c = scratch_dir("cli_det_c");
  REQUIRE(run_cli({"simulate", "--scenario", example("step.json"), "--out", a.string()}).code == 0);
  REQUIRE(run_cli({"simulate", "--scenario", example("step.json"), "--out", b.string()}).code == 0);
  REQUIRE(run_cli({"simulate", "--scenario", example("step.json"), "--out", c.string(), "--seed", "8"}).code == 0);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "trajectory.csv") != slurp(c / "trajectory.csv"));
}

TEST_CASE("simulate: errors and refusals") {
  const auto dir = scratch_dir("cli_sim_errors");
  write_text(dir / "typo.json", R"({"params": {"n": 0.1, "el": 1, "nn": 3}, "price_path": {"type": "constant", "price": 1},
                                    "initial_hashes": 0, "horizon": 5})");
  const auto typo = run_cli({"simulate", "--scenario", (dir / "typo.json").string(), "--out", dir.string()});
  CHECK(typo.code == 2);
  CHECK(contains(typo.err, "params.nn"));

  write_text(dir / "hot.json", R"({"params": {"n": 3, "el": 1}, "price_path": {"type": "constant", "price": 1},
                                   "initial_hashes": 0, "horizon": 5})");
  const auto hot = run_cli({"simulate", "--scenario", (dir / "hot.json").string(), "--out", dir.string()});
  CHECK(hot.code == 3);
  CHECK(contains(hot.err, "n * el < 2"));
  CHECK(run_cli({"simulate", "--scenario", (dir / "hot.json").string(), "--out", dir.string(),
                 "--allow-divergent"})
            .code == 0);

  CHECK(run_cli({"simulate", "--scenario", (dir / "absent.json").string(), "--out", dir.string()}).code == 2);
  write_text(dir / "blocker", "x");
  CHECK(run_cli({"simulate", "--scenario", example("equilibrium.json"), "--out", (dir / "blocker").string()}).code == 2);
}

// ---------------------------------------------------------------- analyze

TEST_CASE("analyze: monotone file has one segment") {
  const auto dir = scratch_dir("cli_monotone");
  std::ostringstream csv;
  csv << "date,price_usd,hashrate_ehs\n";
  const btcmine::Date d0 = btcmine::date_from_string("2016-01-01");
  for (int i = 0; i < 600; ++i)
    csv << btcmine::to_string(d0 + std::chrono::days{i}) << ',' << 400 * std::exp(0.003 * i) << ','
        << 1 + 0.01 * i + 0.001 * (i % 7) << '\n';
  write_text(dir / "in.csv", csv.str());
  const auto r = run_cli({"analyze", "--input", (dir / "in.csv").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "report.json"));
  CHECK(j["rows"] == 600);
  CHECK(j["segmentation"]["boundaries"].empty());
  REQUIRE(j["segmentation"]["segments"].size() == 1);
  CHECK(j["segmentation"]["segments"][0]["label"] == "Period 1");
  CHECK(fs::exists(dir / "log_price.csv"));
  CHECK(slurp(dir / "hashes_per_bitcoin.csv").rfind("date,price_usd,hashes_per_bitcoin\n", 0) == 0);
  CHECK(slurp(dir / "log_price.csv").rfind("date,log_price,smoothed_log_price\n", 0) == 0);
  CHECK(slurp(dir / "cross_correlation.csv").rfind("lag,corr_levels,corr_log_changes\n", 0) == 0);
}

TEST_CASE("analyze: shifted copy is Granger-caused in the shift direction only") {
  const auto dir = scratch_dir("cli_shifted");
  write_text(dir / "in.csv", shifted_copy_csv(3, 1500));
  const auto r = run_cli({"analyze", "--input", (dir / "in.csv").string(), "--out", dir.string(),
                          "--pct-window", "2015-01-01:2015-06-30"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(dir / "report.json"));
  CHECK(j["granger"]["price_to_hash"]["p"].get<double>() < 0.01);
  CHECK(j["granger"]["hash_to_price"]["p"].get<double>() > 0.01);
  CHECK(j["cross_correlation"]["log_changes"]["best_lag"] == 3);
  CHECK(j["lead_lag_verdict"] == "price_leads");
  REQUIRE(j["windows"].size() == 1);
  CHECK(j["windows"][0]["days"] == 180);
}

TEST_CASE("analyze: data errors") {
  const auto dir = scratch_dir("cli_analyze_errors");
  write_text(dir / "bad.csv", "date,price_usd,hashrate_ehs\n2020-01-01,1,1\n2020-01-02,0,1\n");
  const auto bad = run_cli({"analyze", "--input", (dir / "bad.csv").string(), "--out", dir.string()});
  CHECK(bad.code == 2);
  CHECK(contains(bad.err, "line 3"));
  CHECK(run_cli({"analyze", "--input", (dir / "none.csv").string(), "--out", dir.string()}).code == 2);
  CHECK(run_cli({"analyze", "--input", (dir / "bad.csv").string(), "--out", dir.string(), "--gap-policy",
                 "cubic"})
            .code == 1);
}

TEST_CASE("round trip: analyze on simulated output keeps the simulator's verdict") {
  const auto dir = scratch_dir("cli_roundtrip");
  REQUIRE(run_cli({"simulate", "--scenario", example("roundtrip.json"), "--out", dir.string()}).code == 0);
  const auto summary = json::parse(slurp(dir / "summary.json"));
  REQUIRE(fs::exists(dir / "observations.csv"));
  const auto a = run_cli({"analyze", "--input", (dir / "observations.csv").string(), "--out",
                          (dir / "analysis").string(), "--max-lag", "30"});
  REQUIRE(a.code == 0);
  const auto report = json::parse(slurp(dir / "analysis" / "report.json"));
  CHECK(summary["lead_lag"]["verdict"] == "price_leads");
  CHECK(report["lead_lag_verdict"] == summary["lead_lag"]["verdict"]);
  CHECK(report["rows"] == 3000);
}
