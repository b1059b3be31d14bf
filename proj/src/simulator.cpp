#include "btcmine/simulator.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "btcmine/error.hpp"
#include "btcmine/stats.hpp"

namespace btcmine::sim {

void Scenario::validate() const {
  schedule.validate();
  sim::validate(price_path);
  require(horizon >= 1, "horizon must be >= 1");
  require(aggregation >= 1, "aggregation must be >= 1");
  require(std::isfinite(initial_hashes) && initial_hashes >= 0.0, "initial_hashes must be >= 0");
  if (!params.stable() && !allow_divergent)
    fail(ErrorCode::divergent_config,
         "divergent configuration refused: max(n, n_exit) * max(el) = " +
             std::to_string(params.stability_product()) +
             " violates the stability bound n * el < 2 (set allow_divergent to run anyway)");
}

SimOutput run(const Scenario& scenario) {
  scenario.validate();
  const std::vector<double> prices =
      generate_prices(scenario.price_path, scenario.horizon, scenario.seed);

  SimOutput out;
  out.rows.reserve(scenario.horizon);
  double hashes = scenario.initial_hashes;
  bool clamped = false;
  for (std::uint64_t t = 0; t < scenario.horizon; ++t) {
    const double fee = scenario.params.fee().at(t);
    const double el = scenario.params.el().at(t);
    const double reward = protocol::reward_at_height(scenario.schedule, scenario.start_height + t);
    const econ::MarketState state = econ::make_state(t, prices[t], fee, reward, el, hashes);

    SimRow row;
    row.period = t;
    row.price = state.price;
    row.total_hashes = state.total_hashes;
    row.revenue = state.revenue;
    row.variable_cost = state.variable_cost;
    row.excess_profit = state.excess_profit;
    row.reward = reward;
    row.hashes_per_bitcoin =
        reward > 0.0 ? hashes / reward : std::numeric_limits<double>::quiet_NaN();
    row.clamped = clamped;
    row.fee = fee;
    row.el = el;
    out.rows.push_back(row);

    const econ::HashUpdate next = econ::update_hashes(state, scenario.params);
    hashes = next.total_hashes;
    clamped = next.clamped;
    if (!std::isfinite(hashes))
      fail(ErrorCode::divergent_config,
           "hash supply overflowed at period " + std::to_string(t + 1));
  }
  return out;
}

std::vector<SimRow> SimOutput::aggregate(std::uint64_t periods) const {
  require(periods >= 1, "aggregation must be >= 1");
  std::vector<SimRow> out;
  for (std::size_t begin = 0; begin < rows.size(); begin += periods) {
    const std::size_t end = std::min<std::size_t>(rows.size(), begin + periods);
    SimRow agg;
    double hash_sum = 0.0;
    double el_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const SimRow& r = rows[i];
      hash_sum += r.total_hashes;
      el_sum += r.el;
      agg.revenue += r.revenue;
      agg.variable_cost += r.variable_cost;
      agg.excess_profit += r.excess_profit;
      agg.reward += r.reward;
      agg.fee += r.fee;
      agg.clamped = agg.clamped || r.clamped;
    }
    const double count = static_cast<double>(end - begin);
    agg.period = rows[end - 1].period;
    agg.price = rows[end - 1].price;
    agg.total_hashes = hash_sum / count;
    agg.el = el_sum / count;
    agg.hashes_per_bitcoin =
        agg.reward > 0.0 ? hash_sum / agg.reward : std::numeric_limits<double>::quiet_NaN();
    out.push_back(agg);
  }
  return out;
}

double SimOutput::coins_issued() const {
  double coins = 0.0;
  for (const SimRow& r : rows) coins += r.reward;
  return coins;
}

LeadLag lead_lag_probe(const SimOutput& output, int max_lag) {
  require(max_lag >= 0, "max_lag must be >= 0");
  if (output.rows.size() <= 2 * static_cast<std::size_t>(max_lag) + 2)
    fail(ErrorCode::series_too_short,
         "lead-lag probe needs more than 2*max_lag+2 periods, got " +
             std::to_string(output.rows.size()));
  std::vector<double> price, hashes;
  price.reserve(output.rows.size());
  hashes.reserve(output.rows.size());
  for (const SimRow& r : output.rows) {
    price.push_back(r.price);
    hashes.push_back(r.total_hashes);
  }
  const auto dp = stats::diff(price);
  const auto dh = stats::diff(hashes);
  const auto cc = stats::cross_correlate(dp, dh, max_lag);
  return {cc.best_lag, cc.best_corr};
}

namespace {

void put_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
    return;
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, p - buf);
}

}  // namespace

void write_csv(std::ostream& out, std::span<const SimRow> rows) {
  out << "period,price,total_hashes,revenue,variable_cost,excess_profit,reward,"
         "hashes_per_bitcoin,clamp_flag\n";
  for (const SimRow& r : rows) {
    out << r.period << ',';
    put_number(out, r.price);
    out << ',';
    put_number(out, r.total_hashes);
    out << ',';
    put_number(out, r.revenue);
    out << ',';
    put_number(out, r.variable_cost);
    out << ',';
    put_number(out, r.excess_profit);
    out << ',';
    put_number(out, r.reward);
    out << ',';
    put_number(out, r.hashes_per_bitcoin);
    out << ',' << (r.clamped ? 1 : 0) << '\n';
  }
}

}  // namespace btcmine::sim
