#include "btcmine/miner_econ.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "btcmine/error.hpp"

namespace btcmine::econ {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

constexpr double kShareTolerance = 1e-9;

bool same_share(double a, double b) {
  return std::abs(a - b) <= kShareTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

PeriodPath::PeriodPath(double constant) : points_{{0, constant}} {
  require(std::isfinite(constant), "path value must be finite");
}

PeriodPath::PeriodPath(std::vector<std::pair<std::uint64_t, double>> breakpoints)
    : points_(std::move(breakpoints)) {
  require(!points_.empty(), "path needs at least one breakpoint");
  require(points_.front().first == 0, "first path breakpoint must be at period 0");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(std::isfinite(points_[i].second), "path value must be finite");
    if (i > 0) require(points_[i].first > points_[i - 1].first, "path breakpoints must increase");
  }
}

double PeriodPath::at(std::uint64_t period) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), period,
                             [](std::uint64_t p, const auto& bp) { return p < bp.first; });
  return std::prev(it)->second;
}

double PeriodPath::min() const {
  return std::min_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->second;
}

double PeriodPath::max() const {
  return std::max_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->second;
}

ModelParams::ModelParams(double n, PeriodPath el, PeriodPath fee, std::optional<double> n_exit)
    : n_(n), n_exit_(n_exit.value_or(n)), el_(std::move(el)), fee_(std::move(fee)) {
  require(finite_nonneg(n_), "n must be >= 0");
  require(finite_nonneg(n_exit_), "n_exit must be >= 0");
  require(el_.min() > 0.0, "el must be > 0 at every period");
  require(fee_.min() >= 0.0, "fee must be >= 0 at every period");
  stability_product_ = std::max(n_, n_exit_) * el_.max();
}

MarketState make_state(std::uint64_t period, double price, double fee, double reward, double el,
                       double total_hashes) {
  MarketState s;
  s.period = period;
  s.price = price;
  s.fee = fee;
  s.reward = reward;
  s.el = el;
  s.total_hashes = total_hashes;
  s.revenue = total_revenue(price, fee, reward);
  s.variable_cost = total_variable_cost(total_hashes, el);
  s.excess_profit = s.revenue - s.variable_cost;
  return s;
}

bool consistent(const MarketState& s) {
  return s.revenue == s.reward * s.price + s.fee && s.variable_cost == s.total_hashes * s.el &&
         s.excess_profit == s.revenue - s.variable_cost;
}

MinerPosition MinerPosition::of(double own_hashes, double network_hashes) {
  require(finite_nonneg(own_hashes), "own hashes must be >= 0");
  require(std::isfinite(network_hashes) && network_hashes > 0.0, "network hashes must be > 0");
  require(own_hashes <= network_hashes, "own hashes exceed the network total");
  return {own_hashes / network_hashes, own_hashes};
}

void MinerPosition::validate() const {
  require(std::isfinite(hash_share) && hash_share >= 0.0 && hash_share <= 1.0,
          "hash_share must lie in [0, 1]");
  require(finite_nonneg(own_hashes), "own_hashes must be >= 0");
}

double total_revenue(double price, double fee, double reward) {
  require(finite_nonneg(price), "price must be >= 0");
  require(finite_nonneg(fee), "fee must be >= 0");
  require(finite_nonneg(reward), "reward must be >= 0");
  return reward * price + fee;
}

double total_variable_cost(double total_hashes, double el) {
  require(finite_nonneg(total_hashes), "total hashes must be >= 0");
  require(std::isfinite(el) && el > 0.0, "el must be > 0");
  return total_hashes * el;
}

HashUpdate update_hashes(const MarketState& state, const ModelParams& params) {
  const double ex = state.excess_profit;
  const double n = ex < 0.0 ? params.n_exit() : params.n();
  const double next = state.total_hashes + n * ex;
  if (next < 0.0) return {0.0, true};
  return {next, false};
}

double equilibrium_hashes(double price, double fee, double reward, double el) {
  require(std::isfinite(el) && el > 0.0, "el must be > 0");
  return total_revenue(price, fee, reward) / el;
}

double expected_revenue(const MinerPosition& position, double price, double reward,
                        std::uint64_t periods) {
  position.validate();
  require(finite_nonneg(price), "price must be >= 0");
  require(finite_nonneg(reward), "reward must be >= 0");
  require(periods >= 1, "periods must be >= 1");
  return position.hash_share * reward * price * static_cast<double>(periods);
}

CaseOutcome evaluate_case(MiningCase which, const CaseInput& in) {
  auto violated = [&](const std::string& why) -> void {
    fail(ErrorCode::case_precondition,
         "case precondition violated (case " + std::to_string(static_cast<int>(which)) + "): " +
             why);
  };

  const MarketState& s = in.before;
  in.position.validate();
  if (!(s.total_hashes > 0.0)) violated("network hashes must be > 0");
  if (in.position.own_hashes > s.total_hashes) violated("own hashes exceed the network total");
  if (!same_share(in.position.hash_share, in.position.own_hashes / s.total_hashes))
    violated("hash_share does not match own_hashes / network hashes");
  if (!(finite_nonneg(in.entry_hashes) && in.entry_hashes > 0.0))
    violated("rival entry_hashes must be > 0");
  if (!std::isfinite(in.own_capacity_change)) violated("own capacity change must be finite");

  const double own_after = in.position.own_hashes + in.own_capacity_change;
  const double network_after = s.total_hashes + in.entry_hashes + in.own_capacity_change;
  if (own_after < 0.0) violated("own hashes would become negative");

  CaseOutcome out{which, in.position.hash_share, own_after / network_after, 0.0, std::nullopt,
                  std::nullopt};
  auto revenue_at = [&](double share) {
    return expected_revenue(MinerPosition{share, 0.0}, s.price, s.reward, 1);
  };

  switch (which) {
    case MiningCase::defend_share: {
      if (!(in.own_capacity_change > 0.0)) violated("defending share requires new capacity");
      if (!same_share(out.share_after, out.share_before)) violated("share is not held constant");
      out.share_after = out.share_before;
      const double cost = in.cost_delta.value_or(in.own_capacity_change * s.el);
      if (!(cost > 0.0)) violated("new capacity must raise cost");
      out.revenue_delta = 0.0;
      out.cost_delta = cost;
      out.profit_delta = -cost;
      break;
    }
    case MiningCase::stand_pat: {
      if (in.own_capacity_change != 0.0) violated("standing pat means no own capacity change");
      if (in.cost_delta && *in.cost_delta != 0.0) violated("standing pat incurs no new cost");
      if (!(out.share_after < out.share_before)) violated("share must fall under entry");
      out.revenue_delta = revenue_at(out.share_after) - revenue_at(out.share_before);
      out.cost_delta = 0.0;
      out.profit_delta = out.revenue_delta;
      break;
    }
    case MiningCase::grow_share: {
      if (!(in.own_capacity_change > 0.0)) violated("growing share requires new capacity");
      if (!(out.share_after > out.share_before) || same_share(out.share_after, out.share_before))
        violated("share must rise");
      out.revenue_delta = revenue_at(out.share_after) - revenue_at(out.share_before);
      if (in.cost_delta) {
        out.cost_delta = *in.cost_delta;
        out.profit_delta = out.revenue_delta - *in.cost_delta;
      }
      break;
    }
    default:
      violated("unknown case id");
  }
  return out;
}

CaseOutcome evaluate_case(int case_id, const CaseInput& input) {
  if (case_id < 1 || case_id > 3)
    fail(ErrorCode::case_precondition,
         "case precondition violated: case id must be 1, 2 or 3, got " + std::to_string(case_id));
  return evaluate_case(static_cast<MiningCase>(case_id), input);
}

std::string format_grouped(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  const double scale = std::pow(10.0, decimals);
  const double scaled = std::round(std::abs(value) * scale);
  std::string digits;
  if (scaled < 9e15) {
    digits = std::to_string(static_cast<long long>(scaled));
  } else {
    char buf[400];
    std::snprintf(buf, sizeof buf, "%.0f", scaled);
    digits = buf;
  }
  if (static_cast<int>(digits.size()) <= decimals)
    digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
  std::string whole = digits.substr(0, digits.size() - static_cast<std::size_t>(decimals));
  std::string frac = digits.substr(whole.size());
  std::string grouped;
  for (std::size_t i = 0; i < whole.size(); ++i) {
    if (i > 0 && (whole.size() - i) % 3 == 0) grouped += ',';
    grouped += whole[i];
  }
  std::string out = (value < 0.0 && scaled != 0.0) ? "-" : "";
  out += grouped;
  if (decimals > 0) out += "." + frac;
  return out;
}

std::string format_usd(double dollars) {
  std::string g = format_grouped(dollars, 2);
  if (!g.empty() && g[0] == '-') return "-$" + g.substr(1);
  return "$" + g;
}

}  // namespace btcmine::econ
