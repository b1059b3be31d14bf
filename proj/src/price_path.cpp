#include "btcmine/price_path.hpp"

#include <cmath>
#include <numbers>

#include "btcmine/error.hpp"

namespace btcmine::sim {

namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void validate(const PricePathSpec& spec) {
  std::visit(overloaded{
                 [](const ConstantPrice& p) { require(positive(p.price), "price must be > 0"); },
                 [](const StepPrice& p) {
                   require(positive(p.before) && positive(p.after), "step prices must be > 0");
                   require(std::isfinite(p.volatility) && p.volatility >= 0.0,
                           "volatility must be >= 0");
                 },
                 [](const GeometricRandomWalk& p) {
                   require(positive(p.p0), "p0 must be > 0");
                   require(std::isfinite(p.drift), "drift must be finite");
                   require(std::isfinite(p.volatility) && p.volatility >= 0.0,
                           "volatility must be >= 0");
                 },
                 [](const BubblePrice& p) {
                   require(positive(p.p0), "p0 must be > 0");
                   require(std::isfinite(p.up_rate) && std::isfinite(p.down_rate),
                           "bubble rates must be finite");
                 },
                 [](const ReplayPrice& p) {
                   require(!p.prices.empty(), "replay needs at least one price");
                   require(p.periods_per_row >= 1, "periods_per_row must be >= 1");
                   for (double v : p.prices) require(positive(v), "replay prices must be > 0");
                 },
             },
             spec);
}

std::vector<double> generate_prices(const PricePathSpec& spec, std::uint64_t horizon,
                                    std::uint64_t seed) {
  validate(spec);
  std::vector<double> out(horizon);
  std::visit(overloaded{
                 [&](const ConstantPrice& p) { std::fill(out.begin(), out.end(), p.price); },
                 [&](const StepPrice& p) {
                   NormalStream z(seed);
                   double walk = 0.0;
                   for (std::uint64_t t = 0; t < horizon; ++t) {
                     const double level = t < p.at_period ? p.before : p.after;
                     out[t] = p.volatility == 0.0 ? level : level * std::exp(walk);
                     if (p.volatility != 0.0) walk += p.volatility * z.next();
                   }
                 },
                 [&](const GeometricRandomWalk& p) {
                   NormalStream z(seed);
                   double log_p = std::log(p.p0);
                   for (std::uint64_t t = 0; t < horizon; ++t) {
                     out[t] = t == 0 ? p.p0 : std::exp(log_p);
                     log_p += p.drift + p.volatility * z.next();
                   }
                 },
                 [&](const BubblePrice& p) {
                   const double base = std::log(p.p0);
                   const double top = base + p.up_rate * static_cast<double>(p.peak_period);
                   for (std::uint64_t t = 0; t < horizon; ++t) {
                     const double lp =
                         t <= p.peak_period
                             ? base + p.up_rate * static_cast<double>(t)
                             : top - p.down_rate * static_cast<double>(t - p.peak_period);
                     out[t] = std::exp(lp);
                   }
                 },
                 [&](const ReplayPrice& p) {
                   const std::uint64_t available = p.prices.size() * p.periods_per_row;
                   if (available < horizon)
                     fail(ErrorCode::invalid_argument,
                          "replay covers " + std::to_string(available) +
                              " periods, horizon needs " + std::to_string(horizon));
                   for (std::uint64_t t = 0; t < horizon; ++t)
                     out[t] = p.prices[t / p.periods_per_row];
                 },
             },
             spec);
  for (std::uint64_t t = 0; t < horizon; ++t)
    if (!positive(out[t]))
      fail(ErrorCode::invalid_argument,
           "price path leaves the positive finite range at period " + std::to_string(t));
  return out;
}

}  // namespace btcmine::sim
