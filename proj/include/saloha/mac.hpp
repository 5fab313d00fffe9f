// SPDX-License-Identifier: Apache-2.0

/**
 * @file mac.hpp
 * @brief Channel access: Pure ALOHA, the slotted overlay, and slot sizing.
 *
 * A slot is T = T_r + T_b, where T_r covers the uplink airtime, the RX1
 * delay and the ACK airtime, and T_b is the guard that absorbs the sync
 * residual plus the drift accrued between syncs. Slot boundaries form one
 * global grid at integer multiples of T in synchronized time.
 */

#pragma once

#include <cstdint>
#include <variant>

#include "saloha/phy_timing.hpp"
#include "saloha/sync.hpp"
#include "saloha/timebase.hpp"

namespace saloha {

struct SlotPlan {
  Duration t_r{0};
  Duration t_b{0};
  Duration t{0};

  friend bool operator==(const SlotPlan&, const SlotPlan&) = default;
};

/// Throws PreconditionError unless t_r > 0, t_b > 0 and t >= t_r + t_b.
void validate(const SlotPlan& plan);

/// On a missed ACK the node draws a fresh slot phase in [0, max_phase_slots).
struct BackoffPolicy {
  int max_phase_slots = 1;

  friend bool operator==(const BackoffPolicy&, const BackoffPolicy&) = default;
};

struct PureAloha {
  friend bool operator==(const PureAloha&, const PureAloha&) = default;
};

struct SlottedAloha {
  SlotPlan plan;
  BackoffPolicy backoff;

  friend bool operator==(const SlottedAloha&, const SlottedAloha&) = default;
};

using MacPolicy = std::variant<PureAloha, SlottedAloha>;

enum class AccessKind { pure, slotted };

const char* to_string(AccessKind kind);

/// Slot geometry for the given uplink/ACK profiles. `rounding` of zero leaves t unrounded.
SlotPlan plan_slot(const RadioProfile& uplink, const RadioProfile& ack, Duration rx1_delay,
                   Duration guard, Duration rounding);

/// Guard that covers `initial_uncertainty` plus drift over `resync_interval`.
Duration required_guard(Duration initial_uncertainty, double drift_bound_ppm,
                        Duration resync_interval);

/// Index of the first grid boundary at or after `t`: ceil(t / slot).
std::int64_t slot_ceil(LocalInstant t, Duration slot);

struct TxTiming {
  LocalInstant at;
  /// Grid index of `at` for slotted access; -1 for pure ALOHA.
  std::int64_t slot_index = -1;
};

/// When a node that has data ready at `ready_at_local` may start transmitting.
///
/// Pure ALOHA sends immediately. The slotted overlay picks the first grid
/// boundary at or after the ready time and delays it by `phase` whole slots.
/// Throws UnsynchronizedError for slotted access before the first sync.
TxTiming next_tx_time(const MacPolicy& policy, const SyncState& sync, LocalInstant ready_at_local,
                      int phase);

/// Classic ALOHA throughput S(G): G e^{-2G} for pure, G e^{-G} for slotted.
double throughput(AccessKind kind, double offered_load);

/// Peak of throughput(kind, G): 1/(2e) or 1/e.
double peak_throughput(AccessKind kind);

/// Per-node duty cycle a network of `n_nodes` can sustain: min(cap, S_max / N).
double max_node_dc(AccessKind kind, int n_nodes, double regulatory_cap);

}  // namespace saloha
