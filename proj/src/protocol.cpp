#include "btcmine/protocol.hpp"

#include <cmath>

#include "btcmine/error.hpp"

namespace btcmine::protocol {

void IssuanceSchedule::validate() const {
  require(std::isfinite(initial_reward) && initial_reward > 0.0, "initial_reward must be > 0");
  require(halving_interval > 0, "halving_interval must be > 0");
  require(std::isfinite(block_time) && block_time > 0.0, "block_time must be > 0");
}

std::uint64_t epoch_at_height(const IssuanceSchedule& schedule, std::uint64_t height) {
  return height / schedule.halving_interval;
}

double reward_for_epoch(const IssuanceSchedule& schedule, std::uint64_t epoch) {
  // ldexp is exact: halving only touches the exponent.
  if (epoch > 2000) return 0.0;
  double r = std::ldexp(schedule.initial_reward, -static_cast<int>(epoch));
  return r < kCoinUnit ? 0.0 : r;
}

double reward_at_height(const IssuanceSchedule& schedule, std::uint64_t height) {
  return reward_for_epoch(schedule, epoch_at_height(schedule, height));
}

std::uint64_t next_halving_height(const IssuanceSchedule& schedule, std::uint64_t height) {
  return (epoch_at_height(schedule, height) + 1) * schedule.halving_interval;
}

double hashes_per_bitcoin(HashRate rate, double reward, double block_time) {
  require(std::isfinite(rate.ehs) && rate.ehs >= 0.0, "hash rate must be >= 0");
  require(std::isfinite(block_time) && block_time > 0.0, "block_time must be > 0");
  require(std::isfinite(reward) && reward >= 0.0, "reward must be >= 0");
  if (reward == 0.0)
    fail(ErrorCode::post_issuance,
         "post-issuance regime: block reward is zero, hashes per bitcoin is undefined");
  return rate.ehs * block_time / reward;
}

}  // namespace btcmine::protocol
