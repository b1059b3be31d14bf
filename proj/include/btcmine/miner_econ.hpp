#pragma once
// Period economics of the mining sector: revenue, variable cost, excess profit,
// the hash-supply recursion and its zero-profit fixed point, plus single-miner
// calculators (expected revenue, entry-response cases).
//
// One period is one block interval. Hash quantities are exahashes expended per
// period; electricity cost is dollars per exahash.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace btcmine::econ {

/// Piecewise-constant function of the period index. Each breakpoint (p, v)
/// sets the value from period p onward; the first breakpoint must be at 0.
class PeriodPath {
 public:
  PeriodPath(double constant = 0.0);  // NOLINT(google-explicit-constructor)
  explicit PeriodPath(std::vector<std::pair<std::uint64_t, double>> breakpoints);

  double at(std::uint64_t period) const;
  double min() const;
  double max() const;
  bool is_constant() const { return points_.size() == 1; }
  const std::vector<std::pair<std::uint64_t, double>>& breakpoints() const { return points_; }

 private:
  std::vector<std::pair<std::uint64_t, double>> points_;
};

/// Responsiveness and cost environment of the mining sector.
///
/// `n` is new exahashes per period per dollar of prior-period excess profit.
/// `n_exit` applies when excess profit is negative and defaults to `n`.
class ModelParams {
 public:
  ModelParams(double n, PeriodPath el, PeriodPath fee = PeriodPath(0.0),
              std::optional<double> n_exit = std::nullopt);

  double n() const { return n_; }
  double n_exit() const { return n_exit_; }
  const PeriodPath& el() const { return el_; }
  const PeriodPath& fee() const { return fee_; }

  /// max(n, n_exit) * max(el): the worst-case per-period contraction factor
  /// is |1 - this|.
  double stability_product() const { return stability_product_; }
  /// Dynamics converge (possibly with oscillation) iff stability_product < 2.
  bool stable() const { return stability_product_ < 2.0; }

 private:
  double n_;
  double n_exit_;
  PeriodPath el_;
  PeriodPath fee_;
  double stability_product_;
};

struct MarketState {
  std::uint64_t period = 0;
  double price = 0.0;          // $ per BTC
  double fee = 0.0;            // $ per period
  double reward = 0.0;         // BTC per period
  double el = 0.0;             // $ per EH
  double total_hashes = 0.0;   // EH per period
  double revenue = 0.0;        // reward * price + fee
  double variable_cost = 0.0;  // total_hashes * el
  double excess_profit = 0.0;  // revenue - variable_cost
};

/// Builds a state with the derived money columns filled in.
MarketState make_state(std::uint64_t period, double price, double fee, double reward, double el,
                       double total_hashes);

/// True when the derived columns are bit-for-bit recomputable from the inputs.
bool consistent(const MarketState& state);

struct MinerPosition {
  double hash_share = 0.0;  // fraction of network hashes
  double own_hashes = 0.0;  // EH per period

  /// Position holding `own_hashes` of a network doing `network_hashes`.
  static MinerPosition of(double own_hashes, double network_hashes);
  void validate() const;
};

double total_revenue(double price, double fee, double reward);
double total_variable_cost(double total_hashes, double el);

struct HashUpdate {
  double total_hashes = 0.0;
  bool clamped = false;  // the unclamped value was negative
};

/// Next period's hash supply: total + n * excess_profit, floored at zero.
HashUpdate update_hashes(const MarketState& state, const ModelParams& params);

/// Zero-excess-profit hash level (reward * price + fee) / el.
double equilibrium_hashes(double price, double fee, double reward, double el);

/// Lottery expectation share * reward * price * periods.
double expected_revenue(const MinerPosition& position, double price, double reward,
                        std::uint64_t periods);

enum class MiningCase : int {
  defend_share = 1,  // invest to hold share constant against entry
  stand_pat = 2,     // no new capacity; share is diluted
  grow_share = 3,    // invest enough to raise share
};

struct CaseInput {
  MarketState before;
  MinerPosition position;
  double entry_hashes = 0.0;         // EH per period added by rivals
  double own_capacity_change = 0.0;  // EH per period added by this miner
  std::optional<double> cost_delta;  // $ per period; overrides own_change * el
};

struct CaseOutcome {
  MiningCase which;
  double share_before = 0.0;
  double share_after = 0.0;
  double revenue_delta = 0.0;               // expected $ per period
  std::optional<double> cost_delta;         // nullopt: unknown per-unit cost
  std::optional<double> profit_delta;       // nullopt: indeterminate
};

/// Throws Error(case_precondition) when the inputs do not describe `which`.
CaseOutcome evaluate_case(MiningCase which, const CaseInput& input);
CaseOutcome evaluate_case(int case_id, const CaseInput& input);

/// "$2,321.88": cents, half away from zero, comma-grouped.
std::string format_usd(double dollars);
/// Comma-grouped decimal with a fixed number of fraction digits.
std::string format_grouped(double value, int decimals);

}  // namespace btcmine::econ
