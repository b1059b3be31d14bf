#pragma once
// Exogenous price paths for the simulator.
//
// Stochastic paths draw standard normals from NormalStream, whose algorithm is
// fixed so that trajectories are reproducible from a seed on any platform:
//   * raw 64-bit words come from std::mt19937_64 seeded with `seed`;
//   * u1 = ((w1 >> 11) + 1) * 2^-53 lies in (0, 1], u2 = (w2 >> 11) * 2^-53 in [0, 1);
//   * Box-Muller: r = sqrt(-2 ln u1), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2);
//   * z0 is returned first, then z1, then the next pair is drawn.

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace btcmine::sim {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ConstantPrice {
  double price = 0.0;
};

/// `before` until `at_period`, then `after`. A nonzero volatility overlays a
/// driftless log random walk (log-step volatility * z per period).
struct StepPrice {
  double before = 0.0;
  double after = 0.0;
  std::uint64_t at_period = 0;
  double volatility = 0.0;
};

/// log P[t+1] = log P[t] + drift + volatility * z[t], P[0] = p0.
struct GeometricRandomWalk {
  double p0 = 0.0;
  double drift = 0.0;
  double volatility = 0.0;
};

/// Log-linear rise at up_rate per period until peak_period, then log-linear
/// decline at down_rate per period.
struct BubblePrice {
  double p0 = 0.0;
  double up_rate = 0.0;
  std::uint64_t peak_period = 0;
  double down_rate = 0.0;
};

/// Replays recorded prices; each recorded value is held for periods_per_row
/// periods (144 turns daily data into 10-minute periods).
struct ReplayPrice {
  std::vector<double> prices;
  std::uint64_t periods_per_row = 1;
  std::string source;
};

using PricePathSpec =
    std::variant<ConstantPrice, StepPrice, GeometricRandomWalk, BubblePrice, ReplayPrice>;

/// Checks parameter ranges (positive prices, finite rates).
void validate(const PricePathSpec& spec);

/// Price for periods 0..horizon-1. Throws if any generated price is not a
/// positive finite number, or a replay is shorter than the horizon.
std::vector<double> generate_prices(const PricePathSpec& spec, std::uint64_t horizon,
                                    std::uint64_t seed);

}  // namespace btcmine::sim
