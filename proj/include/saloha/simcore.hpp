// SPDX-License-Identifier: Apache-2.0

/**
 * @file simcore.hpp
 * @brief Deterministic discrete-event simulation of a single-gateway network.
 *
 * Nodes are LoRaWAN Class A devices: every uplink may request an ACK, which
 * the gateway sends one RX1 delay after the uplink ends. Each ACK carries the
 * gateway's end-of-reception timestamp, so every acknowledged uplink is also
 * a sync exchange. The gateway is drift-free and its clock is the reference
 * timeline. Collisions are pure interval overlap on a shared channel: no
 * capture, no SF orthogonality, and the downlink never collides.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "saloha/mac.hpp"
#include "saloha/metrics.hpp"
#include "saloha/phy_timing.hpp"
#include "saloha/sync.hpp"
#include "saloha/timebase.hpp"

namespace saloha {

using NodeId = int;
inline constexpr NodeId kGateway = -1;

enum class EventKind : std::uint8_t {
  node_data_ready,
  tx_start,
  tx_end,
  rx1_open,
  ack_tx_start,
  ack_rx,
  ack_timeout,
};

const char* to_string(EventKind kind);

struct Event {
  TrueInstant fire_at;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::node_data_ready;
  NodeId subject = kGateway;
  /// Trace index for uplink-related events, alarm generation for data-ready.
  std::uint64_t payload = 0;
};

/// Strict weak order: earlier fire time first, then lower sequence number.
constexpr bool fires_before(const Event& a, const Event& b) {
  return a.fire_at != b.fire_at ? a.fire_at < b.fire_at : a.sequence < b.sequence;
}

struct Transmission {
  NodeId node_id = 0;
  int channel = 0;
  TrueInstant start;
  Duration duration{0};
  bool confirmed = true;

  TrueInstant end() const { return start + duration; }
};

/// Two transmissions conflict when their half-open on-air intervals
/// intersect on the same channel.
bool conflicts(const Transmission& a, const Transmission& b);

/// Collided flag per input: set when it conflicts with at least one other.
std::vector<bool> channel_arbitrate(std::span<const Transmission> active);

struct AirtimeUse {
  TrueInstant start;
  Duration duration{0};
};

struct DutyCycleDecision {
  /// Empty when the transmission may go ahead as proposed.
  std::optional<TrueInstant> defer_until;

  bool allowed() const { return !defer_until.has_value(); }
};

/// Airtime from `history` inside [window_end - window, window_end).
Duration airtime_in_window(std::span<const AirtimeUse> history, TrueInstant window_end,
                           Duration window);

/// Sliding-window regulatory check: the airtime inside the window ending
/// when `proposed` finishes, proposed included, must not exceed cap * window.
/// Otherwise returns the earliest start time at which it would.
DutyCycleDecision enforce_duty_cycle(std::span<const AirtimeUse> history,
                                     const Transmission& proposed, double cap, Duration window);

enum class ChannelSelection { fixed, round_robin, uniform_random };
enum class ConfirmMode {
  /// Every uplink requests an ACK.
  always,
  /// Only uplinks needed to keep the sync uncertainty below the guard.
  resync,
};

const char* to_string(ChannelSelection v);
const char* to_string(ConfirmMode v);

/// Residual sync error: |e| ~ Normal(mean, stddev) truncated to [0, max], random sign.
struct ResidualModel {
  Duration mean = kMeanSyncResidual;
  Duration stddev = std::chrono::microseconds{2500};
  Duration max = kMaxSyncResidual;
};

struct ScenarioConfig {
  int n_nodes = 20;
  Duration app_period = std::chrono::seconds{30};
  /// Each data-ready alarm is delayed by a uniform draw in [0, jitter].
  Duration jitter{0};
  RadioProfile uplink_profile{7, 125'000, 1, 6, 101, true, true, false};
  RadioProfile ack_profile{7, 125'000, 1, 6, kAckPayloadBytes, true, true, false};
  MacPolicy policy = PureAloha{};
  int n_channels = 1;
  ChannelSelection channel_selection = ChannelSelection::fixed;
  /// Crystal error magnitude range; the sign is drawn uniformly.
  double drift_ppm_low = 20.0;
  double drift_ppm_high = 80.0;
  /// Initial RTC offsets are uniform in [-max, +max].
  Duration max_initial_offset = std::chrono::seconds{5};
  /// Per-node first data-ready time on the node's RTC, in [0, app_period).
  /// Empty draws it uniformly.
  std::vector<Duration> first_ready;
  /// Tolerance the nodes assume when bounding their own uncertainty.
  double drift_bound_ppm = 80.0;
  ResidualModel residual;
  Duration rx1_delay = std::chrono::seconds{1};
  /// Resync threshold on the sync uncertainty.
  Duration guard = std::chrono::milliseconds{400};
  ConfirmMode confirm = ConfirmMode::always;
  double duty_cycle_cap = 0.01;
  Duration duty_cycle_window = std::chrono::hours{1};
  Duration duration = std::chrono::hours{24};
  /// Records starting before this are the warm-up; the rest is steady state.
  Duration warmup = std::chrono::hours{1};
  std::optional<std::uint64_t> rng_seed;
};

/// Throws ConfigError listing every offending field.
void validate(const ScenarioConfig& config);

/// One synchronization exchange as seen by the omniscient observer.
struct SyncEvent {
  NodeId node_id = 0;
  std::size_t record_index = 0;
  /// End of the uplink whose timestamps were exchanged.
  TrueInstant reference;
  /// When the node stepped its clock (end of ACK reception).
  TrueInstant applied_at;
  Duration offset{0};
  Duration residual{0};
  /// Ground-truth misalignment at `applied_at` just before the step.
  Duration misalignment_before{0};
  /// Node's uncertainty bound at `applied_at` just before the step; empty if unsynced.
  std::optional<Duration> bound_before;
  /// Ground-truth misalignment of the corrected clock at `reference`.
  Duration misalignment_at_reference{0};
};

struct RunCounters {
  std::uint64_t data_ready = 0;
  std::uint64_t pending_at_end = 0;
  std::uint64_t duty_cycle_deferrals = 0;
  std::uint64_t events_processed = 0;
  Duration gateway_ack_airtime{0};
};

struct NodeSetup {
  NodeId id = 0;
  double drift_ppm = 0.0;
  Duration initial_offset{0};
};

struct RunResult {
  std::vector<TransmissionRecord> trace;
  Metrics summary;
  std::vector<SyncEvent> sync_log;
  std::vector<NodeSetup> nodes;
  RunCounters counters;
};

/// Event-loop engine. Single-threaded; one instance per run.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Processes events until `t` (exclusive). New uplinks are not started at or past the horizon.
  void run_until(TrueInstant t);
  /// Runs to the configured horizon and lets in-flight exchanges finish.
  void finish();

  TrueInstant now() const;
  const ScenarioConfig& config() const;
  const std::vector<TransmissionRecord>& trace() const;
  const std::vector<SyncEvent>& sync_log() const;
  const std::vector<NodeSetup>& nodes() const;
  const RunCounters& counters() const;
  const SyncState& sync_state(NodeId node) const;

  /// Node clock minus gateway clock at `t`, using the node's current corrections.
  Duration ground_truth_misalignment(NodeId node, TrueInstant t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Validates, runs to the horizon, and summarizes the trace.
RunResult run(const ScenarioConfig& config);

}  // namespace saloha
