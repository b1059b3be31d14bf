#include "btcmine/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "btcmine/empirics.hpp"
#include "btcmine/error.hpp"

namespace btcmine::io {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorCode::invalid_argument, "scenario: " + path + ": " + what);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) bad(join(path, item.key()), "unknown key");
  }
}

const json& need(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) bad(join(path, key), "missing required key");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(path, "expected a finite number");
  return d;
}

std::uint64_t count(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad(path, "expected a non-negative integer");
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), join(path, key)) : fallback;
}

econ::PeriodPath period_path(const json& v, const std::string& path) {
  if (v.is_number()) return econ::PeriodPath(number(v, path));
  if (!v.is_array() || v.empty()) bad(path, "expected a number or [[period, value], ...]");
  std::vector<std::pair<std::uint64_t, double>> points;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) bad(p, "expected [period, value]");
    points.emplace_back(count(v[i][0], p + "[0]"), number(v[i][1], p + "[1]"));
  }
  try {
    return econ::PeriodPath(std::move(points));
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

sim::PricePathSpec price_path(const json& v, const std::filesystem::path& base_dir) {
  const std::string path = "price_path";
  if (!v.is_object()) bad(path, "expected an object");
  const json& type_v = need(v, path, "type");
  if (!type_v.is_string()) bad(path + ".type", "expected a string");
  const std::string type = type_v.get<std::string>();

  if (type == "constant") {
    only_keys(v, path, {"type", "price"});
    return sim::ConstantPrice{number(need(v, path, "price"), path + ".price")};
  }
  if (type == "step") {
    only_keys(v, path, {"type", "before", "after", "at_period", "volatility"});
    return sim::StepPrice{number(need(v, path, "before"), path + ".before"),
                          number(need(v, path, "after"), path + ".after"),
                          count(need(v, path, "at_period"), path + ".at_period"),
                          number_or(v, path, "volatility", 0.0)};
  }
  if (type == "geometric_random_walk") {
    only_keys(v, path, {"type", "p0", "drift", "volatility"});
    return sim::GeometricRandomWalk{number(need(v, path, "p0"), path + ".p0"),
                                    number_or(v, path, "drift", 0.0),
                                    number(need(v, path, "volatility"), path + ".volatility")};
  }
  if (type == "bubble") {
    only_keys(v, path, {"type", "p0", "up_rate", "peak_period", "down_rate"});
    return sim::BubblePrice{number(need(v, path, "p0"), path + ".p0"),
                            number(need(v, path, "up_rate"), path + ".up_rate"),
                            count(need(v, path, "peak_period"), path + ".peak_period"),
                            number(need(v, path, "down_rate"), path + ".down_rate")};
  }
  if (type == "replay") {
    only_keys(v, path, {"type", "file", "prices", "periods_per_row"});
    sim::ReplayPrice replay;
    replay.periods_per_row =
        v.contains("periods_per_row") ? count(v.at("periods_per_row"), path + ".periods_per_row") : 1;
    if (v.contains("file") == v.contains("prices"))
      bad(path, "replay needs exactly one of 'file' or 'prices'");
    if (v.contains("file")) {
      if (!v.at("file").is_string()) bad(path + ".file", "expected a path string");
      std::filesystem::path file = v.at("file").get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      replay.prices = empirics::ingest(file, empirics::GapPolicy::reject).prices();
      replay.source = file.string();
    } else {
      const json& arr = v.at("prices");
      if (!arr.is_array()) bad(path + ".prices", "expected an array of numbers");
      for (std::size_t i = 0; i < arr.size(); ++i)
        replay.prices.push_back(number(arr[i], path + ".prices[" + std::to_string(i) + "]"));
      replay.source = "inline";
    }
    return replay;
  }
  bad(path + ".type", "unknown price path type '" + type +
                          "' (want constant, step, geometric_random_walk, bubble or replay)");
}

}  // namespace

ScenarioDocument parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::invalid_argument, std::string("scenario: not valid JSON: ") + e.what());
  }
  only_keys(doc, "",
            {"params", "schedule", "price_path", "initial_hashes", "horizon", "aggregation",
             "start_height", "seed", "allow_divergent", "start_date", "probe_max_lag"});

  const json& p = need(doc, "", "params");
  only_keys(p, "params", {"n", "n_exit", "el", "fee"});
  std::optional<double> n_exit;
  if (p.contains("n_exit")) n_exit = number(p.at("n_exit"), "params.n_exit");
  std::optional<econ::ModelParams> params;
  try {
    params.emplace(number(need(p, "params", "n"), "params.n"),
                   period_path(need(p, "params", "el"), "params.el"),
                   p.contains("fee") ? period_path(p.at("fee"), "params.fee") : econ::PeriodPath(0.0),
                   n_exit);
  } catch (const Error& e) {
    if (std::string(e.what()).rfind("scenario:", 0) == 0) throw;
    bad("params", e.what());
  }

  protocol::IssuanceSchedule schedule = protocol::kMainnet;
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    only_keys(s, "schedule", {"initial_reward", "halving_interval", "block_time"});
    schedule.initial_reward = number_or(s, "schedule", "initial_reward", schedule.initial_reward);
    if (s.contains("halving_interval"))
      schedule.halving_interval = count(s.at("halving_interval"), "schedule.halving_interval");
    schedule.block_time = number_or(s, "schedule", "block_time", schedule.block_time);
  }

  ScenarioDocument out{sim::Scenario{.params = *params,
                                     .schedule = schedule,
                                     .price_path = price_path(need(doc, "", "price_path"), base_dir)},
                       date_from_string("2020-01-01"), std::nullopt};
  sim::Scenario& sc = out.scenario;
  sc.horizon = count(need(doc, "", "horizon"), "horizon");
  if (doc.contains("aggregation")) sc.aggregation = count(doc.at("aggregation"), "aggregation");
  if (doc.contains("start_height")) sc.start_height = count(doc.at("start_height"), "start_height");
  if (doc.contains("seed")) sc.seed = count(doc.at("seed"), "seed");
  if (doc.contains("allow_divergent")) {
    if (!doc.at("allow_divergent").is_boolean()) bad("allow_divergent", "expected true or false");
    sc.allow_divergent = doc.at("allow_divergent").get<bool>();
  }
  if (doc.contains("start_date")) {
    const json& d = doc.at("start_date");
    auto parsed = d.is_string() ? parse_date(d.get<std::string>()) : std::nullopt;
    if (!parsed) bad("start_date", "expected a YYYY-MM-DD string");
    out.start_date = *parsed;
  }
  if (doc.contains("probe_max_lag"))
    out.probe_max_lag = static_cast<int>(count(doc.at("probe_max_lag"), "probe_max_lag"));

  const json& ih = need(doc, "", "initial_hashes");
  if (ih.is_string()) {
    if (ih.get<std::string>() != "equilibrium")
      bad("initial_hashes", "expected a number or \"equilibrium\"");
    const std::vector<double> p0 = sim::generate_prices(sc.price_path, 1, sc.seed);
    sc.initial_hashes = econ::equilibrium_hashes(
        p0[0], sc.params.fee().at(0), protocol::reward_at_height(sc.schedule, sc.start_height),
        sc.params.el().at(0));
  } else {
    sc.initial_hashes = number(ih, "initial_hashes");
  }
  if (sc.horizon < 1) bad("horizon", "must be >= 1");
  if (sc.aggregation < 1) bad("aggregation", "must be >= 1");
  if (sc.initial_hashes < 0.0) bad("initial_hashes", "must be >= 0");
  return out;
}

ScenarioDocument load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::invalid_argument, "cannot open scenario '" + file.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), file.parent_path());
}

void write_file_atomic(const std::filesystem::path& target, std::string_view contents) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::data_error, "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::data_error, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) fail(ErrorCode::data_error, "cannot rename onto '" + target.string() + "': " + ec.message());
}

}  // namespace btcmine::io
