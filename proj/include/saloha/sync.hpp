// SPDX-License-Identifier: Apache-2.0

/**
 * @file sync.hpp
 * @brief ACK-piggybacked clock synchronization.
 *
 * Both ends timestamp the end of an uplink. The gateway's timestamp is the
 * reference; it travels back in the RX1 ACK as an 8-byte value, the node
 * takes the difference against its own TX timestamp and steps its RTC by it.
 * No skew estimation is done: between syncs the node's uncertainty grows
 * linearly at the assumed worst-case crystal tolerance.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "saloha/timebase.hpp"

namespace saloha {

/// Worst-case residual error of one sync exchange.
inline constexpr Duration kMaxSyncResidual = std::chrono::milliseconds{15};
/// Mean residual error of one sync exchange.
inline constexpr Duration kMeanSyncResidual = std::chrono::milliseconds{10};
/// Bound on the gateway's end-of-reception timestamp error.
inline constexpr Duration kAckTimestampError = std::chrono::microseconds{20};

struct SyncState {
  LocalInstant last_sync_local{};
  Duration uncertainty_at_sync{0};
  double drift_bound_ppm = 80.0;
  bool synced = false;

  friend bool operator==(const SyncState&, const SyncState&) = default;
};

/// Timestamp carried by the ACK: microseconds since the simulation epoch.
struct SyncAck {
  static constexpr std::size_t kWireSize = 8;

  std::uint64_t gateway_timestamp_us = 0;

  TrueInstant gateway_time() const;

  /// Unsigned little-endian.
  std::array<std::uint8_t, kWireSize> serialize() const;
  /// Throws PreconditionError unless exactly kWireSize bytes are given.
  static SyncAck deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const SyncAck&, const SyncAck&) = default;
};

/// Builds an ACK from a gateway timestamp. It must be microsecond aligned and non-negative.
SyncAck make_sync_ack(TrueInstant gateway_timestamp);

/// Node-side TX timestamp capture (step 1).
constexpr LocalInstant node_record_tx_end(LocalInstant local_clock_reading) {
  return local_clock_reading;
}

/// Gateway-side RX timestamp capture with its timing error, quantized to 1 us.
/// The quantization never pushes the result further than |timestamp_error| from `t`.
/// Throws ContractViolation when |timestamp_error| exceeds kAckTimestampError.
TrueInstant gateway_record_rx_end(TrueInstant t, Duration timestamp_error);

/// Offset the node must add to its RTC (step 3).
constexpr Duration compute_offset(LocalInstant node_tx_timestamp, TrueInstant gateway_timestamp) {
  return gateway_timestamp.time_since_epoch() - node_tx_timestamp.time_since_epoch();
}

struct SyncResult {
  SyncState state;
  Duration corrections;
};

/// Steps the node clock (steps 4 and 5).
///
/// `residual_error` is the signed error the exchange leaves behind; it is
/// added on top of `offset`, and its magnitude becomes the new uncertainty.
/// `now_local` is the corrected RTC reading the uncertainty is anchored to.
/// Throws ContractViolation when |residual_error| exceeds kMaxSyncResidual.
SyncResult apply_sync(const SyncState& state, Duration corrections, Duration offset,
                      Duration residual_error, LocalInstant now_local);

/// Bound on |node clock - gateway clock| at `now_local`. Throws UnsynchronizedError.
Duration current_uncertainty(const SyncState& state, LocalInstant now_local);

/// True when the node is unsynced or its uncertainty has reached `guard`.
bool needs_resync(const SyncState& state, LocalInstant now_local, Duration guard);

/// Longest gap between syncs that keeps the uncertainty below `guard`.
/// Throws GuardTooSmallError or PreconditionError.
Duration max_resync_interval(Duration guard, Duration initial_uncertainty, double drift_bound_ppm);

}  // namespace saloha
