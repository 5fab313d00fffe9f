// SPDX-License-Identifier: Apache-2.0

#include "saloha/mac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "saloha/errors.hpp"

namespace saloha {

void validate(const SlotPlan& plan) {
  if (plan.t_r <= Duration{0}) {
    throw PreconditionError("slot plan: t_r must be positive");
  }
  if (plan.t_b <= Duration{0}) {
    throw PreconditionError("slot plan: t_b must be positive");
  }
  if (plan.t < plan.t_r + plan.t_b) {
    throw PreconditionError("slot plan: t must be at least t_r + t_b");
  }
}

const char* to_string(AccessKind kind) {
  return kind == AccessKind::pure ? "pure" : "slotted";
}

SlotPlan plan_slot(const RadioProfile& uplink, const RadioProfile& ack, Duration rx1_delay,
                   Duration guard, Duration rounding) {
  if (rx1_delay <= Duration{0}) {
    throw PreconditionError("plan_slot: rx1_delay must be positive");
  }
  if (guard <= Duration{0}) {
    throw PreconditionError("plan_slot: guard must be positive");
  }
  if (rounding < Duration{0}) {
    throw PreconditionError("plan_slot: rounding must be non-negative");
  }
  SlotPlan plan;
  plan.t_r = time_on_air(uplink) + rx1_delay + time_on_air(ack);
  plan.t_b = guard;
  plan.t = plan.t_r + plan.t_b;
  if (rounding > Duration{0}) {
    const auto r = rounding.count();
    plan.t = Duration{(plan.t.count() + r - 1) / r * r};
  }
  return plan;
}

Duration required_guard(Duration initial_uncertainty, double drift_bound_ppm,
                        Duration resync_interval) {
  if (initial_uncertainty < Duration{0} || drift_bound_ppm < 0.0 || resync_interval < Duration{0}) {
    throw PreconditionError("required_guard: inputs must be non-negative");
  }
  return initial_uncertainty + drift_error(drift_bound_ppm, resync_interval);
}

std::int64_t slot_ceil(LocalInstant t, Duration slot) {
  const auto n = t.time_since_epoch().count();
  const auto s = slot.count();
  // integer division truncates toward zero, which already is ceil for n < 0
  auto q = n / s;
  if (n % s != 0 && n > 0) {
    ++q;
  }
  return q;
}

TxTiming next_tx_time(const MacPolicy& policy, const SyncState& sync, LocalInstant ready_at_local,
                      int phase) {
  if (std::holds_alternative<PureAloha>(policy)) {
    return TxTiming{ready_at_local, -1};
  }
  const auto& slotted = std::get<SlottedAloha>(policy);
  if (!sync.synced) {
    throw UnsynchronizedError();
  }
  if (phase < 0) {
    throw PreconditionError("next_tx_time: phase must be non-negative");
  }
  const std::int64_t index = slot_ceil(ready_at_local, slotted.plan.t) + phase;
  return TxTiming{LocalInstant{index * slotted.plan.t}, index};
}

double throughput(AccessKind kind, double offered_load) {
  if (offered_load < 0.0) {
    throw PreconditionError("throughput: offered load must be non-negative");
  }
  const double k = kind == AccessKind::pure ? 2.0 : 1.0;
  return offered_load * std::exp(-k * offered_load);
}

double peak_throughput(AccessKind kind) {
  return kind == AccessKind::pure ? 1.0 / (2.0 * std::numbers::e) : 1.0 / std::numbers::e;
}

double max_node_dc(AccessKind kind, int n_nodes, double regulatory_cap) {
  if (n_nodes < 1) {
    throw PreconditionError("max_node_dc: need at least one node");
  }
  if (!(regulatory_cap > 0.0) || regulatory_cap > 1.0) {
    throw PreconditionError("max_node_dc: cap must lie in (0, 1]");
  }
  return std::min(regulatory_cap, peak_throughput(kind) / n_nodes);
}

}  // namespace saloha
