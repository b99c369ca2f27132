#pragma once

#include <string>

#include "canline/line.hpp"

namespace canline {

/// Everything one run needs, parsed from a single flat key/value document.
struct RunConfig {
  SimulationConfig sim;
};

/// Parse the run config grammar: `key: value` lines, `#` comments, and an
/// optional `names:` class list (inline `[a, b]` or dash lines). Unknown
/// keys raise ConfigError; so do out-of-range values.
[[nodiscard]] RunConfig parse_run_config(const std::string& text);

/// Canonical rendering of a run config; parse_run_config inverts it.
[[nodiscard]] std::string write_run_config(const RunConfig& config);

}  // namespace canline
