// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "saloha/timebase.hpp"

namespace saloha {

/// One uplink attempt as observed by the simulator.
struct TransmissionRecord {
  std::uint64_t index = 0;
  int node_id = 0;
  TrueInstant true_start;
  LocalInstant local_start;
  /// Grid slot for slotted access by a synced node.
  std::optional<std::int64_t> slot_index;
  int channel = 0;
  Duration duration{0};
  bool confirmed = false;
  bool collided = false;
  bool acked = false;
  /// Gateway ACK start time, when one was sent.
  std::optional<TrueInstant> ack_sent_at;
  /// Node's own uncertainty bound at transmission start, when synced.
  std::optional<Duration> sync_uncertainty;

  TrueInstant true_end() const { return true_start + duration; }

  friend bool operator==(const TransmissionRecord&, const TransmissionRecord&) = default;
};

}  // namespace saloha
