#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace btcmine {

using Date = std::chrono::sys_days;

/// Strict YYYY-MM-DD. Returns nullopt on anything else, including invalid days.
std::optional<Date> parse_date(std::string_view text);
/// Throws Error(invalid_argument) on bad input.
Date date_from_string(std::string_view text);
std::string to_string(Date date);

inline long days_between(Date from, Date to) { return (to - from).count(); }

}  // namespace btcmine
