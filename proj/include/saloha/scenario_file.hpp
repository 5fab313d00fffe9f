// SPDX-License-Identifier: Apache-2.0

/**
 * @file scenario_file.hpp
 * @brief Scenario files: INI sections of `key = value` entries.
 *
 * Sections and keys (defaults in parentheses):
 *
 *     [scenario]   nodes (20), period (30s), jitter (0s), duration (24h),
 *                  warmup (1h), seed, channels (1),
 *                  channel_selection (fixed | round-robin | uniform-random),
 *                  confirm (always | resync), initial_offset (5s),
 *                  drift_ppm_min (20), drift_ppm_max (80)
 *     [uplink]     sf (7), bandwidth (125000), coding_rate (1), preamble (6),
 *                  payload (101), explicit_header (true), crc (true), ldro (false)
 *     [ack]        same keys as [uplink]; defaults to the uplink profile
 *                  with a 13-byte payload
 *     [mac]        policy (pure | slotted), rx1_delay (1s), guard (400ms),
 *                  rounding (100ms), slot (auto | duration),
 *                  max_phase_slots (auto | integer)
 *     [sync]       drift_bound_ppm (80), residual_mean (10ms),
 *                  residual_stddev (2.5ms), residual_max (15ms)
 *     [duty_cycle] cap (0.01), window (1h)
 *
 * Durations take a unit suffix: ns, us, ms, s, min, h, d. Comments start
 * with ';'. Unknown sections or keys are errors.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "saloha/simcore.hpp"

namespace saloha {

/// "400ms", "4812.5s", "7d", ... Throws PreconditionError on malformed input.
Duration parse_duration(std::string_view text);

/// Shortest exact rendering with the largest unit that divides evenly, e.g. "400ms", "7d".
std::string format_duration(Duration d);

struct ScenarioFile {
  /// Configuration with the declared policy.
  ScenarioConfig config;
  /// Slotted variant derived from [mac]; used when a run forces slotted access.
  SlottedAloha slotted;
};

/// Parses and resolves a scenario. Does not run `validate`, so command-line
/// overrides can still fill in fields such as the seed.
/// Throws ConfigError listing every problem found.
ScenarioFile parse_scenario(std::istream& in);

/// Throws IoError when the file cannot be read.
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Derives the slotted policy for `config` from [mac]-style parameters.
/// `slot` of zero means "plan it"; `max_phase_slots` of zero means period / T.
SlottedAloha derive_slotted(const ScenarioConfig& config, Duration rounding, Duration slot,
                            int max_phase_slots);

ScenarioConfig with_policy(ScenarioConfig config, const MacPolicy& policy);

/// Stable `key = value` rendering of every resolved field except the seed.
std::string canonical_config(const ScenarioConfig& config);

/// FNV-1a 64 of canonical_config.
std::uint64_t config_hash(const ScenarioConfig& config);

}  // namespace saloha
