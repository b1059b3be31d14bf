#pragma once
// Scenario documents (JSON, `//` comments allowed) and atomic file output.
// The full schema is documented in README.md and examples_config/.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "btcmine/date.hpp"
#include "btcmine/simulator.hpp"

namespace btcmine::io {

struct ScenarioDocument {
  sim::Scenario scenario;
  Date start_date;                     // calendar day of period 0 for daily exports
  std::optional<int> probe_max_lag;    // lead-lag probe window, periods
};

/// Unknown keys anywhere in the document are rejected with their dotted path.
/// Relative replay files resolve against base_dir.
ScenarioDocument parse_scenario(std::string_view text,
                                const std::filesystem::path& base_dir = {});
ScenarioDocument load_scenario(const std::filesystem::path& file);

/// Writes to a sibling temporary file and renames it over `target`.
void write_file_atomic(const std::filesystem::path& target, std::string_view contents);

}  // namespace btcmine::io
