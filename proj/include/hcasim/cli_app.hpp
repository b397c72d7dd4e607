#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcasim/config.hpp"

namespace hcasim {

// Exit codes: 0 success, 1 runtime/validation failure, 2 usage error.

// Runs simengine per (scheme, seed); writes hourly.csv, summary.csv,
// per-run bs_energy.csv (and events.log when enabled), and manifest.json.
int cmd_sim(const ScenarioConfig& config, const std::vector<Scheme>& schemes,
            const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
            int jobs);

// Runs the RRH selection experiment per seed; writes table3.csv with
// per-seed rows plus a mean/std summary block, and manifest.json.
int cmd_learn(const ScenarioConfig& config,
              const std::vector<std::uint64_t>& seeds,
              const std::string& out_dir, int jobs);

// Fast invariant suite; prints one pass/fail line per check.
int cmd_validate(const ScenarioConfig& config);

// Full argv entry point (subcommands sim | learn | validate).
int run_cli(int argc, const char* const* argv);

}  // namespace hcasim
