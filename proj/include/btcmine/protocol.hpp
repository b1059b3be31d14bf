#pragma once
// Bitcoin issuance law: block-reward epochs, halvings, and hashes per coin.

#include <cstdint>

namespace btcmine::protocol {

/// Smallest coin unit (one satoshi). Rewards below this are zero.
inline constexpr double kCoinUnit = 1e-8;

struct IssuanceSchedule {
  double initial_reward = 50.0;           // BTC per block
  std::uint64_t halving_interval = 210000;  // blocks
  double block_time = 600.0;              // seconds per block

  /// Throws Error(invalid_argument) unless all three fields are positive.
  void validate() const;
};

inline constexpr IssuanceSchedule kMainnet{};

/// Network hash rate in exahashes per second.
struct HashRate {
  double ehs = 0.0;
};

std::uint64_t epoch_at_height(const IssuanceSchedule& schedule, std::uint64_t height);

/// Reward for an epoch index: initial_reward / 2^epoch, or 0 below one satoshi.
double reward_for_epoch(const IssuanceSchedule& schedule, std::uint64_t epoch);

/// Block reward in BTC at the given height.
double reward_at_height(const IssuanceSchedule& schedule, std::uint64_t height);

/// First height of the epoch following the one containing `height`.
std::uint64_t next_halving_height(const IssuanceSchedule& schedule, std::uint64_t height);

/// Exahashes expended per coin issued: rate * block_time / reward.
/// Throws Error(post_issuance) when reward is zero.
double hashes_per_bitcoin(HashRate rate, double reward, double block_time);

}  // namespace btcmine::protocol
