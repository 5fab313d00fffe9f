// SPDX-License-Identifier: Apache-2.0

#include "saloha/phy_timing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saloha/errors.hpp"

namespace saloha {

void validate(const RadioProfile& p) {
  if (p.spreading_factor < 6 || p.spreading_factor > 12) {
    throw PreconditionError("spreading_factor must be in 6..12, got " +
                            std::to_string(p.spreading_factor));
  }
  if (p.bandwidth_hz != 125'000 && p.bandwidth_hz != 250'000 && p.bandwidth_hz != 500'000) {
    throw PreconditionError("bandwidth_hz must be 125000, 250000 or 500000, got " +
                            std::to_string(p.bandwidth_hz));
  }
  if (p.coding_rate_index < 1 || p.coding_rate_index > 4) {
    throw PreconditionError("coding_rate_index must be in 1..4, got " +
                            std::to_string(p.coding_rate_index));
  }
  if (p.preamble_symbols < 1) {
    throw PreconditionError("preamble_symbols must be >= 1");
  }
  if (p.payload_bytes < 0 || p.payload_bytes > 255) {
    throw PreconditionError("payload_bytes must be in 0..255, got " +
                            std::to_string(p.payload_bytes));
  }
}

RadioProfile ack_profile_for(const RadioProfile& uplink, int payload_bytes) {
  RadioProfile ack = uplink;
  ack.payload_bytes = payload_bytes;
  return ack;
}

Duration symbol_time(const RadioProfile& profile) {
  validate(profile);
  // 1e9 / BW is an integer for every legal bandwidth.
  return Duration{(std::int64_t{1} << profile.spreading_factor) *
                  (1'000'000'000 / profile.bandwidth_hz)};
}

std::int64_t payload_symbol_count(const RadioProfile& p) {
  validate(p);
  const int sf = p.spreading_factor;
  const int de = p.low_data_rate_optimize ? 1 : 0;
  const int ih = p.explicit_header ? 0 : 1;
  const int crc = p.crc_enabled ? 1 : 0;
  const std::int64_t numerator = 8 * p.payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih;
  const std::int64_t denominator = 4 * (sf - 2 * de);
  // ceil for a possibly negative numerator; the max() below clamps those anyway
  const std::int64_t blocks =
      numerator > 0 ? (numerator + denominator - 1) / denominator : 0;
  return 8 + std::max<std::int64_t>(blocks * (p.coding_rate_index + 4), 0);
}

Duration time_on_air(const RadioProfile& profile) {
  const Duration ts = symbol_time(profile);
  // (preamble + 4.25 + n) * Ts, kept integral: Ts is a multiple of 4 ns.
  const std::int64_t quarter_symbols =
      4 * (profile.preamble_symbols + payload_symbol_count(profile)) + 17;
  return Duration{quarter_symbols * (ts.count() / 4)};
}

double duty_cycle(Duration airtime, Duration period) {
  if (period <= Duration{0}) {
    throw PreconditionError("duty_cycle: period must be positive");
  }
  return static_cast<double>(airtime.count()) / static_cast<double>(period.count());
}

Duration min_period_for_dc(Duration airtime, double dc_cap) {
  if (!(dc_cap > 0.0) || dc_cap > 1.0) {
    throw PreconditionError("min_period_for_dc: cap must lie in (0, 1]");
  }
  return Duration{static_cast<std::int64_t>(
      std::ceil(static_cast<long double>(airtime.count()) / dc_cap - 1e-6L))};
}

}  // namespace saloha
