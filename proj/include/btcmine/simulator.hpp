#pragma once
// Discrete-time mining economy under an exogenous price path.
//
// Each period is one block interval. Period t uses the price, fee and
// electricity cost for t and the block reward at start_height + t; the hash
// supply for t+1 follows from t's excess profit. Coins issued per period equal
// the block reward whatever the hash supply (difficulty retargeting is taken
// as exact).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "btcmine/miner_econ.hpp"
#include "btcmine/price_path.hpp"
#include "btcmine/protocol.hpp"

namespace btcmine::sim {

struct Scenario {
  econ::ModelParams params;
  protocol::IssuanceSchedule schedule = protocol::kMainnet;
  PricePathSpec price_path = ConstantPrice{1.0};
  double initial_hashes = 0.0;    // EH per period
  std::uint64_t horizon = 1;      // periods
  std::uint64_t aggregation = 144;
  std::uint64_t start_height = 0;
  std::uint64_t seed = 0;
  bool allow_divergent = false;

  /// Throws Error(invalid_argument) on bad fields and Error(divergent_config)
  /// when the stability bound fails without allow_divergent.
  void validate() const;
};

struct SimRow {
  std::uint64_t period = 0;
  double price = 0.0;
  double total_hashes = 0.0;
  double revenue = 0.0;
  double variable_cost = 0.0;
  double excess_profit = 0.0;
  double reward = 0.0;              // coins issued this period
  double hashes_per_bitcoin = 0.0;  // NaN once the reward is zero
  bool clamped = false;             // total_hashes was floored at zero
  double fee = 0.0;
  double el = 0.0;
};

struct SimOutput {
  std::vector<SimRow> rows;  // one per period

  /// Buckets of `periods` rows: last period index and price, mean hashes,
  /// summed money and reward columns, hashes per bitcoin as summed hashes over
  /// summed reward, clamp flag if any period clamped.
  std::vector<SimRow> aggregate(std::uint64_t periods) const;
  double coins_issued() const;
};

SimOutput run(const Scenario& scenario);

struct LeadLag {
  int best_lag = 0;      // > 0: price changes lead hash changes
  double correlation = 0.0;
};

/// Cross-correlates first differences of price and total hashes.
LeadLag lead_lag_probe(const SimOutput& output, int max_lag);

/// Writes the fixed CSV layout:
/// period,price,total_hashes,revenue,variable_cost,excess_profit,reward,hashes_per_bitcoin,clamp_flag
void write_csv(std::ostream& out, std::span<const SimRow> rows);

}  // namespace btcmine::sim
