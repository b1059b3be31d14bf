#pragma once

#include <stdexcept>
#include <string>

namespace btcmine {

enum class ErrorCode {
  invalid_argument,
  post_issuance,       // block reward has reached zero
  case_precondition,   // evaluate_case inputs inconsistent with the case id
  divergent_config,    // n * el >= 2 without allow_divergent
  degenerate_series,   // zero variance where a correlation is required
  collinear_lags,      // singular regression design
  data_error,          // malformed input file or series
  missing_date,
  series_too_short,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace btcmine
