#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcasim/rrhlearn.hpp"
#include "hcasim/simengine.hpp"

namespace hcasim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full scenario configuration for both the system simulation and the RRH
// selection experiment. File format is line-oriented `section.key = value`
// with `#` comments; omitted keys keep their defaults, unknown keys are
// rejected.
struct ScenarioConfig {
  ScenarioParams sim;
  LearnParams learn;
  double sinr_cap_db = 22.0;  // sim.sinr_cap_linear derives from this
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "out";
  bool record_events = false;
};

// Parses config text. Throws ConfigError with a line number for syntax
// problems and with the key name for range violations.
ScenarioConfig parse_config(const std::string& text);

// Defaults when path is empty; otherwise reads and parses the file.
ScenarioConfig load_config_file(const std::string& path);

// Canonical serialization: every key in fixed order. parse(serialize(c))
// round-trips to an equal config.
std::string serialize_config(const ScenarioConfig& config);

// Cross-field invariants (e.g. p_sleep < p0). Throws ConfigError naming the
// violated invariant.
void validate_config(const ScenarioConfig& config);

// FNV-1a over the canonical serialization.
std::uint64_t config_checksum(const ScenarioConfig& config);

}  // namespace hcasim
