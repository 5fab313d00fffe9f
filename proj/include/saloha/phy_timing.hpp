// SPDX-License-Identifier: Apache-2.0

/**
 * @file phy_timing.hpp
 * @brief LoRa time-on-air and duty-cycle arithmetic.
 */

#pragma once

#include <cstdint>

#include "saloha/timebase.hpp"

namespace saloha {

struct RadioProfile {
  int spreading_factor = 7;
  std::int64_t bandwidth_hz = 125'000;
  /// Coding rate 4/(4 + index).
  int coding_rate_index = 1;
  int preamble_symbols = 8;
  int payload_bytes = 0;
  bool explicit_header = true;
  bool crc_enabled = true;
  bool low_data_rate_optimize = false;

  friend bool operator==(const RadioProfile&, const RadioProfile&) = default;
};

/// Throws PreconditionError naming the first field out of range.
void validate(const RadioProfile& profile);

/// Payload size of the sync-carrying ACK: 8-byte timestamp + 5 bytes of framing.
inline constexpr int kAckPayloadBytes = 13;

/// Profile used for ACK downlinks: same modulation as `uplink`, ACK payload.
RadioProfile ack_profile_for(const RadioProfile& uplink, int payload_bytes = kAckPayloadBytes);

/// 2^SF / BW.
Duration symbol_time(const RadioProfile& profile);

/// Number of payload symbols, including the 8-symbol header block.
std::int64_t payload_symbol_count(const RadioProfile& profile);

/// Total packet duration: preamble, 4.25 sync symbols, payload symbols.
Duration time_on_air(const RadioProfile& profile);

/// airtime / period.
double duty_cycle(Duration airtime, Duration period);

/// Smallest period for which `airtime` stays within `dc_cap`. Rounded up to 1 ns.
Duration min_period_for_dc(Duration airtime, double dc_cap);

}  // namespace saloha
