// SPDX-License-Identifier: Apache-2.0

#include "saloha/sync.hpp"

#include <cmath>
#include <string>

#include "saloha/errors.hpp"

namespace saloha {

namespace {

constexpr std::int64_t kNsPerUs = 1'000;

}  // namespace

TrueInstant SyncAck::gateway_time() const {
  return TrueInstant{Duration{static_cast<std::int64_t>(gateway_timestamp_us) * kNsPerUs}};
}

std::array<std::uint8_t, SyncAck::kWireSize> SyncAck::serialize() const {
  std::array<std::uint8_t, kWireSize> out{};
  for (std::size_t i = 0; i < kWireSize; ++i) {
    out[i] = static_cast<std::uint8_t>(gateway_timestamp_us >> (8 * i));
  }
  return out;
}

SyncAck SyncAck::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kWireSize) {
    throw PreconditionError("SyncAck expects exactly 8 bytes, got " +
                            std::to_string(bytes.size()));
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < kWireSize; ++i) {
    v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  return SyncAck{v};
}

SyncAck make_sync_ack(TrueInstant gateway_timestamp) {
  const auto ns = gateway_timestamp.time_since_epoch().count();
  if (ns < 0 || ns % kNsPerUs != 0) {
    throw PreconditionError("SyncAck timestamp must be a non-negative whole microsecond");
  }
  return SyncAck{static_cast<std::uint64_t>(ns / kNsPerUs)};
}

TrueInstant gateway_record_rx_end(TrueInstant t, Duration timestamp_error) {
  if (timestamp_error > kAckTimestampError || timestamp_error < -kAckTimestampError) {
    throw ContractViolation("gateway timestamp error outside +/-20 us");
  }
  const std::int64_t raw = (t + timestamp_error).time_since_epoch().count();
  // Round half away from zero to whole microseconds.
  const std::int64_t mag = raw < 0 ? -raw : raw;
  std::int64_t us = (mag + kNsPerUs / 2) / kNsPerUs;
  if (raw < 0) {
    us = -us;
  }
  TrueInstant q{Duration{us * kNsPerUs}};
  const Duration bound = timestamp_error < Duration{0} ? -timestamp_error : timestamp_error;
  // Pull back toward t if rounding overshot the error bound.
  if (q - t > bound) {
    q -= Duration{kNsPerUs};
  } else if (t - q > bound) {
    q += Duration{kNsPerUs};
  }
  return q;
}

SyncResult apply_sync(const SyncState& state, Duration corrections, Duration offset,
                      Duration residual_error, LocalInstant now_local) {
  const Duration magnitude = residual_error < Duration{0} ? -residual_error : residual_error;
  if (magnitude > kMaxSyncResidual) {
    throw ContractViolation("sync residual exceeds the 15 ms worst case");
  }
  SyncState next = state;
  next.synced = true;
  next.last_sync_local = now_local;
  next.uncertainty_at_sync = magnitude;
  return SyncResult{next, apply_correction(corrections, offset + residual_error)};
}

Duration current_uncertainty(const SyncState& state, LocalInstant now_local) {
  if (!state.synced) {
    throw UnsynchronizedError();
  }
  const Duration elapsed = now_local - state.last_sync_local;
  return state.uncertainty_at_sync +
         drift_error(state.drift_bound_ppm, elapsed < Duration{0} ? Duration{0} : elapsed);
}

bool needs_resync(const SyncState& state, LocalInstant now_local, Duration guard) {
  if (guard <= Duration{0}) {
    throw PreconditionError("needs_resync: guard must be positive");
  }
  return !state.synced || current_uncertainty(state, now_local) >= guard;
}

Duration max_resync_interval(Duration guard, Duration initial_uncertainty, double drift_bound_ppm) {
  if (guard <= initial_uncertainty) {
    throw GuardTooSmallError();
  }
  if (!(drift_bound_ppm > 0.0) || !std::isfinite(drift_bound_ppm)) {
    throw PreconditionError("max_resync_interval: drift bound must be positive");
  }
  // (guard - u0) / (ppm * 1e-6), exact in the binary value of ppm.
  int exp2 = 0;
  const double frac = std::frexp(drift_bound_ppm, &exp2);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int shift = 53 - exp2;
  __extension__ typedef __int128 i128;
  const std::int64_t headroom = (guard - initial_uncertainty).count();
  const int headroom_bits = 64 - __builtin_clzll(static_cast<unsigned long long>(headroom));
  if (shift < 0 || headroom_bits + 20 + shift > 125) {
    return Duration{std::llround(static_cast<long double>(headroom) * 1e6L /
                                 static_cast<long double>(drift_bound_ppm))};
  }
  const i128 num = static_cast<i128>(headroom) * 1'000'000 * (static_cast<i128>(1) << shift);
  const i128 q = (2 * num + mant) / (2 * static_cast<i128>(mant));
  return Duration{static_cast<std::int64_t>(q)};
}

}  // namespace saloha
