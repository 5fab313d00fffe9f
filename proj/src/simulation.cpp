// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <queue>
#include <string>

#include "saloha/errors.hpp"
#include "saloha/random.hpp"
#include "saloha/simcore.hpp"

namespace saloha {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::node_data_ready: return "node-data-ready";
    case EventKind::tx_start: return "tx-start";
    case EventKind::tx_end: return "tx-end";
    case EventKind::rx1_open: return "rx1-open";
    case EventKind::ack_tx_start: return "ack-tx-start";
    case EventKind::ack_rx: return "ack-rx";
    case EventKind::ack_timeout: return "ack-timeout";
  }
  return "?";
}

const char* to_string(ChannelSelection v) {
  switch (v) {
    case ChannelSelection::fixed: return "fixed";
    case ChannelSelection::round_robin: return "round-robin";
    case ChannelSelection::uniform_random: return "uniform-random";
  }
  return "?";
}

const char* to_string(ConfirmMode v) {
  return v == ConfirmMode::always ? "always" : "resync";
}

void validate(const ScenarioConfig& c) {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const char* what) {
    if (!ok) {
      bad.emplace_back(what);
    }
  };
  auto profile_ok = [&](const RadioProfile& p, const char* what) {
    try {
      validate(p);
    } catch (const PreconditionError& e) {
      bad.push_back(std::string(what) + ": " + e.what());
      return false;
    }
    return true;
  };
  const bool uplink_ok = profile_ok(c.uplink_profile, "uplink_profile");
  profile_ok(c.ack_profile, "ack_profile");

  check(c.n_nodes >= 1, "n_nodes: must be >= 1");
  if (uplink_ok) {
    check(c.app_period > time_on_air(c.uplink_profile),
          "app_period: must exceed the uplink time-on-air");
    if (c.duty_cycle_cap > 0.0 && c.duty_cycle_window > Duration{0}) {
      check(static_cast<long double>(time_on_air(c.uplink_profile).count()) <=
                static_cast<long double>(c.duty_cycle_cap) * c.duty_cycle_window.count(),
            "duty_cycle_window: one uplink does not fit in the duty-cycle budget");
    }
  }
  check(c.jitter >= Duration{0} && c.jitter < c.app_period,
        "jitter: must be in [0, app_period)");
  check(c.first_ready.empty() || c.first_ready.size() == static_cast<std::size_t>(c.n_nodes),
        "first_ready: need one entry per node or none");
  check(std::all_of(c.first_ready.begin(), c.first_ready.end(),
                    [&](Duration d) { return d >= Duration{0} && d < c.app_period; }),
        "first_ready: entries must be in [0, app_period)");
  check(c.n_channels >= 1, "n_channels: must be >= 1");
  check(c.drift_ppm_low >= 0.0 && c.drift_ppm_low <= c.drift_ppm_high &&
            c.drift_ppm_high <= kMaxDriftPpm,
        "drift_ppm: need 0 <= low <= high <= 500");
  check(c.max_initial_offset >= Duration{0}, "max_initial_offset: must be >= 0");
  check(c.drift_bound_ppm > 0.0 && c.drift_bound_ppm <= kMaxDriftPpm,
        "drift_bound_ppm: must be in (0, 500]");
  check(c.residual.max > Duration{0} && c.residual.max <= kMaxSyncResidual,
        "residual.max: must be in (0, 15 ms]");
  check(c.residual.mean >= Duration{0} && c.residual.mean <= c.residual.max,
        "residual.mean: must be in [0, residual.max]");
  check(c.residual.stddev >= Duration{0}, "residual.stddev: must be >= 0");
  check(c.rx1_delay > Duration{0}, "rx1_delay: must be positive");
  check(c.guard > c.residual.max, "guard: must exceed residual.max");
  check(c.duty_cycle_cap > 0.0 && c.duty_cycle_cap <= 1.0, "duty_cycle_cap: must be in (0, 1]");
  check(c.duty_cycle_window > Duration{0}, "duty_cycle_window: must be positive");
  check(c.duration > Duration{0}, "duration: must be positive");
  check(c.warmup >= Duration{0}, "warmup: must be >= 0");
  check(c.rng_seed.has_value(), "rng_seed: required");
  if (const auto* s = std::get_if<SlottedAloha>(&c.policy)) {
    try {
      validate(s->plan);
    } catch (const PreconditionError& e) {
      bad.push_back(std::string("policy.plan: ") + e.what());
    }
    check(s->backoff.max_phase_slots >= 1, "policy.backoff.max_phase_slots: must be >= 1");
  }
  if (!bad.empty()) {
    throw ConfigError(std::move(bad));
  }
}

namespace {

struct PendingTx {
  std::optional<std::int64_t> slot;
  bool confirmed = false;
};

struct Node {
  Node(NodeId id_, ClockModel clock_, std::uint64_t seed)
      : id(id_),
        clock(clock_),
        traffic(seed, static_cast<std::uint64_t>(id_), "traffic"),
        sync_rng(seed, static_cast<std::uint64_t>(id_), "sync"),
        mac(seed, static_cast<std::uint64_t>(id_), "mac") {}

  NodeId id;
  ClockModel clock;
  Duration corrections{0};
  SyncState sync;
  RngStream traffic;
  RngStream sync_rng;
  RngStream mac;
  int phase = 0;

  std::deque<LocalInstant> ready;
  bool busy = false;
  bool rx_open = false;
  PendingTx pending;

  LocalInstant alarm_base;
  LocalInstant alarm_target;
  std::uint64_t alarm_generation = 0;

  std::vector<AirtimeUse> history;
  std::uint64_t uplinks = 0;
  LocalInstant tx_timestamp;
  std::array<std::uint8_t, SyncAck::kWireSize> inbound_ack{};
};

struct OnAir {
  Transmission tx;
  std::size_t record = 0;
};

struct FiresLater {
  bool operator()(const Event& a, const Event& b) const { return fires_before(b, a); }
};

Duration draw_residual(RngStream& rng, const ResidualModel& m) {
  const auto max_ns = static_cast<double>(m.max.count());
  double mag = std::clamp(static_cast<double>(m.mean.count()), 0.0, max_ns);
  if (m.stddev > Duration{0}) {
    do {
      mag = rng.normal(static_cast<double>(m.mean.count()), static_cast<double>(m.stddev.count()));
    } while (mag < 0.0 || mag > max_ns);
  }
  const Duration d{std::min<std::int64_t>(std::llround(mag), m.max.count())};
  return rng.coin() ? d : -d;
}

}  // namespace

struct Simulation::Impl {
  explicit Impl(ScenarioConfig c) : cfg(std::move(c)) {
    validate(cfg);
    uplink_airtime = time_on_air(cfg.uplink_profile);
    ack_airtime = time_on_air(cfg.ack_profile);
    if (const auto* s = std::get_if<SlottedAloha>(&cfg.policy)) {
      slotted = *s;
    }
    horizon = TrueInstant{cfg.duration};
    const std::uint64_t seed = *cfg.rng_seed;

    nodes.reserve(static_cast<std::size_t>(cfg.n_nodes));
    gateway_rx.resize(static_cast<std::size_t>(cfg.n_nodes));
    for (NodeId id = 0; id < cfg.n_nodes; ++id) {
      RngStream setup(seed, static_cast<std::uint64_t>(id), "setup");
      double magnitude = cfg.drift_ppm_low;
      if (cfg.drift_ppm_high > cfg.drift_ppm_low) {
        magnitude = setup.uniform(cfg.drift_ppm_low, cfg.drift_ppm_high);
      }
      const double drift = setup.coin() ? magnitude : -magnitude;
      const Duration offset = setup.uniform_duration(-cfg.max_initial_offset, cfg.max_initial_offset);
      Duration first_phase = setup.uniform_duration(Duration{0}, cfg.app_period - Duration{1});
      if (!cfg.first_ready.empty()) {
        first_phase = cfg.first_ready[static_cast<std::size_t>(id)];
      }
      setups.push_back(NodeSetup{id, drift, offset});

      Node& n = nodes.emplace_back(id, ClockModel{drift, offset, TrueInstant{}}, seed);
      n.sync.drift_bound_ppm = cfg.drift_bound_ppm;
      n.alarm_base = local(n, TrueInstant{}) + first_phase;
      n.alarm_target = n.alarm_base + draw_jitter(n);
      arm_alarm(n);
    }
  }

  // -- helpers ---------------------------------------------------------------

  LocalInstant local(const Node& n, TrueInstant t) const {
    return local_now(n.clock, n.corrections, t);
  }

  Duration misalignment(const Node& n, TrueInstant t) const {
    return local(n, t).time_since_epoch() - t.time_since_epoch();
  }

  Duration draw_jitter(Node& n) {
    return cfg.jitter > Duration{0} ? n.traffic.uniform_duration(Duration{0}, cfg.jitter)
                                    : Duration{0};
  }

  void schedule(TrueInstant at, EventKind kind, NodeId subject, std::uint64_t payload) {
    queue.push(Event{at, next_sequence++, kind, subject, payload});
  }

  void arm_alarm(Node& n) {
    const TrueInstant at =
        std::max(now, true_time_of(n.clock, n.corrections, n.alarm_target));
    schedule(at, EventKind::node_data_ready, n.id, ++n.alarm_generation);
  }

  // -- node behavior ---------------------------------------------------------

  struct Plan {
    TrueInstant at;
    std::optional<std::int64_t> slot;
  };

  Plan plan_at(const Node& n, LocalInstant ready, bool slotted_access) const {
    if (!slotted_access) {
      if (slotted.has_value()) {
        // Unsynced fallback: the backoff phase still spreads retried bootstraps.
        ready += n.phase * slotted->plan.t;
      }
      return Plan{std::max(now, true_time_of(n.clock, n.corrections, ready)), std::nullopt};
    }
    for (;;) {
      const TxTiming timing = next_tx_time(cfg.policy, n.sync, ready, n.phase);
      const TrueInstant at = true_time_of(n.clock, n.corrections, timing.at);
      if (at >= now) {
        return Plan{at, timing.slot_index};
      }
      ready = timing.at + Duration{1};
    }
  }

  void start_attempt(Node& n) {
    LocalInstant ready = n.ready.front();
    n.ready.pop_front();
    const LocalInstant local_now_v = local(n, now);
    ready = std::max(ready, local_now_v);

    const bool slotted_access = slotted.has_value() && n.sync.synced;
    Duration lookahead = cfg.app_period + cfg.jitter + uplink_airtime + cfg.rx1_delay + ack_airtime;
    if (slotted.has_value()) {
      lookahead += (n.phase + 1) * slotted->plan.t;
    }
    const bool confirmed = cfg.confirm == ConfirmMode::always ||
                           needs_resync(n.sync, local_now_v + lookahead, cfg.guard);

    Plan plan = plan_at(n, ready, slotted_access);
    for (;;) {
      const Transmission proposal{n.id, 0, plan.at, uplink_airtime, confirmed};
      const DutyCycleDecision d =
          enforce_duty_cycle(n.history, proposal, cfg.duty_cycle_cap, cfg.duty_cycle_window);
      if (d.allowed()) {
        break;
      }
      ++counters.duty_cycle_deferrals;
      LocalInstant later = local(n, *d.defer_until);
      plan = plan_at(n, later, slotted_access);
      while (plan.at < *d.defer_until) {
        later += Duration{1};
        plan = plan_at(n, later, slotted_access);
      }
    }
    n.pending = PendingTx{plan.slot, confirmed};
    n.busy = true;
    schedule(plan.at, EventKind::tx_start, n.id, 0);
  }

  void finish_uplink(Node& n) {
    n.busy = false;
    if (!n.ready.empty() && !draining) {
      start_attempt(n);
    }
  }

  int pick_channel(Node& n) {
    switch (cfg.channel_selection) {
      case ChannelSelection::fixed:
        return n.id % cfg.n_channels;
      case ChannelSelection::round_robin:
        return static_cast<int>((static_cast<std::uint64_t>(n.id) + n.uplinks) %
                                static_cast<std::uint64_t>(cfg.n_channels));
      case ChannelSelection::uniform_random:
        return static_cast<int>(n.mac.uniform_int(0, cfg.n_channels - 1));
    }
    return 0;
  }

  // -- event handlers --------------------------------------------------------

  void on_data_ready(Node& n, std::uint64_t generation) {
    if (generation != n.alarm_generation) {
      return;  // superseded by a clock step
    }
    ++counters.data_ready;
    n.ready.push_back(n.alarm_target);
    n.alarm_base += cfg.app_period;
    n.alarm_target = n.alarm_base + draw_jitter(n);
    arm_alarm(n);
    if (!n.busy) {
      start_attempt(n);
    }
  }

  void on_tx_start(Node& n) {
    TransmissionRecord r;
    r.index = trace.size();
    r.node_id = n.id;
    r.true_start = now;
    r.local_start = local(n, now);
    r.slot_index = n.pending.slot;
    r.channel = pick_channel(n);
    r.duration = uplink_airtime;
    r.confirmed = n.pending.confirmed;
    if (n.sync.synced) {
      r.sync_uncertainty = current_uncertainty(n.sync, r.local_start);
    }
    trace.push_back(r);

    std::erase_if(on_air, [&](const OnAir& a) { return a.tx.end() <= now; });
    const Transmission tx{n.id, r.channel, now, uplink_airtime, r.confirmed};
    std::vector<Transmission> group;
    std::vector<std::size_t> members;
    for (const auto& a : on_air) {
      if (a.tx.channel == tx.channel) {
        group.push_back(a.tx);
        members.push_back(a.record);
      }
    }
    group.push_back(tx);
    members.push_back(r.index);
    const std::vector<bool> collided = channel_arbitrate(group);
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (collided[k]) {
        trace[members[k]].collided = true;
      }
    }
    on_air.push_back(OnAir{tx, r.index});

    std::erase_if(n.history, [&](const AirtimeUse& u) {
      return u.start + u.duration <= now - cfg.duty_cycle_window;
    });
    n.history.push_back(AirtimeUse{now, uplink_airtime});
    ++n.uplinks;
    schedule(now + uplink_airtime, EventKind::tx_end, n.id, r.index);
  }

  void on_tx_end(Node& n, std::size_t rec) {
    n.tx_timestamp = node_record_tx_end(local(n, now));
    const TransmissionRecord& r = trace[rec];
    if (!r.confirmed) {
      finish_uplink(n);
      return;
    }
    schedule(now + cfg.rx1_delay, EventKind::rx1_open, n.id, rec);
    if (!r.collided) {
      const Duration err = n.sync_rng.uniform_duration(-kAckTimestampError, kAckTimestampError);
      gateway_rx[static_cast<std::size_t>(n.id)] = gateway_record_rx_end(now, err);
      schedule(now + cfg.rx1_delay, EventKind::ack_tx_start, kGateway, rec);
    } else {
      schedule(now + cfg.rx1_delay + ack_airtime, EventKind::ack_timeout, n.id, rec);
    }
  }

  void on_ack_tx_start(std::size_t rec) {
    TransmissionRecord& r = trace[rec];
    r.ack_sent_at = now;
    counters.gateway_ack_airtime += ack_airtime;
    Node& n = nodes[static_cast<std::size_t>(r.node_id)];
    n.inbound_ack = make_sync_ack(gateway_rx[static_cast<std::size_t>(r.node_id)]).serialize();
    schedule(now + ack_airtime, EventKind::ack_rx, r.node_id, rec);
  }

  void on_ack_rx(Node& n, std::size_t rec) {
    if (!n.rx_open) {
      throw ContractViolation("ACK delivered outside the RX1 window");
    }
    n.rx_open = false;
    TransmissionRecord& r = trace[rec];
    if (r.collided) {
      throw ContractViolation("ACK for a collided uplink");
    }
    r.acked = true;
    if (!slotted.has_value()) {
      finish_uplink(n);
      return;
    }

    const SyncAck ack = SyncAck::deserialize(n.inbound_ack);
    const Duration offset = compute_offset(n.tx_timestamp, ack.gateway_time());
    const Duration residual = draw_residual(n.sync_rng, cfg.residual);

    SyncEvent ev;
    ev.node_id = n.id;
    ev.record_index = rec;
    ev.reference = r.true_end();
    ev.applied_at = now;
    ev.offset = offset;
    ev.residual = residual;
    ev.misalignment_before = misalignment(n, now);
    if (n.sync.synced) {
      ev.bound_before = current_uncertainty(n.sync, local(n, now));
    }
    // The sync point is the shared end-of-uplink event, read on the corrected clock.
    const LocalInstant anchor = n.tx_timestamp + offset + residual;
    const SyncResult res = apply_sync(n.sync, n.corrections, offset, residual, anchor);
    n.sync = res.state;
    n.corrections = res.corrections;
    ev.misalignment_at_reference = misalignment(n, ev.reference);
    sync_log.push_back(ev);

    arm_alarm(n);
    finish_uplink(n);
  }

  void on_ack_timeout(Node& n) {
    n.rx_open = false;
    if (slotted.has_value()) {
      n.phase = static_cast<int>(n.mac.uniform_int(0, slotted->backoff.max_phase_slots - 1));
    }
    finish_uplink(n);
  }

  void dispatch(const Event& e) {
    ++counters.events_processed;
    switch (e.kind) {
      case EventKind::node_data_ready:
        on_data_ready(node(e.subject), e.payload);
        break;
      case EventKind::tx_start:
        on_tx_start(node(e.subject));
        break;
      case EventKind::tx_end:
        on_tx_end(node(e.subject), e.payload);
        break;
      case EventKind::rx1_open:
        node(e.subject).rx_open = true;
        break;
      case EventKind::ack_tx_start:
        on_ack_tx_start(e.payload);
        break;
      case EventKind::ack_rx:
        on_ack_rx(node(e.subject), e.payload);
        break;
      case EventKind::ack_timeout:
        on_ack_timeout(node(e.subject));
        break;
    }
  }

  Node& node(NodeId id) { return nodes[static_cast<std::size_t>(id)]; }

  void run_until(TrueInstant t) {
    const TrueInstant stop = std::min(t, horizon);
    while (!queue.empty() && queue.top().fire_at < stop) {
      const Event e = queue.top();
      queue.pop();
      now = e.fire_at;
      dispatch(e);
    }
  }

  void finish() {
    if (finished) {
      return;
    }
    run_until(horizon);
    draining = true;
    while (!queue.empty()) {
      const Event e = queue.top();
      queue.pop();
      if (e.kind == EventKind::node_data_ready) {
        continue;
      }
      if (e.kind == EventKind::tx_start) {
        ++counters.pending_at_end;
        continue;
      }
      now = e.fire_at;
      dispatch(e);
    }
    for (const auto& n : nodes) {
      counters.pending_at_end += n.ready.size();
    }
    finished = true;
  }

  ScenarioConfig cfg;
  Duration uplink_airtime{0};
  Duration ack_airtime{0};
  std::optional<SlottedAloha> slotted;
  TrueInstant now{};
  TrueInstant horizon{};
  std::uint64_t next_sequence = 0;
  std::priority_queue<Event, std::vector<Event>, FiresLater> queue;
  std::vector<Node> nodes;
  std::vector<NodeSetup> setups;
  std::vector<TrueInstant> gateway_rx;
  std::vector<TransmissionRecord> trace;
  std::vector<SyncEvent> sync_log;
  std::vector<OnAir> on_air;
  RunCounters counters;
  bool draining = false;
  bool finished = false;
};

Simulation::Simulation(ScenarioConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::run_until(TrueInstant t) { impl_->run_until(t); }
void Simulation::finish() { impl_->finish(); }
TrueInstant Simulation::now() const { return impl_->now; }
const ScenarioConfig& Simulation::config() const { return impl_->cfg; }
const std::vector<TransmissionRecord>& Simulation::trace() const { return impl_->trace; }
const std::vector<SyncEvent>& Simulation::sync_log() const { return impl_->sync_log; }
const std::vector<NodeSetup>& Simulation::nodes() const { return impl_->setups; }
const RunCounters& Simulation::counters() const { return impl_->counters; }

const SyncState& Simulation::sync_state(NodeId node) const {
  if (node < 0 || node >= impl_->cfg.n_nodes) {
    throw PreconditionError("unknown node " + std::to_string(node));
  }
  return impl_->nodes[static_cast<std::size_t>(node)].sync;
}

Duration Simulation::ground_truth_misalignment(NodeId node, TrueInstant t) const {
  if (node < 0 || node >= impl_->cfg.n_nodes) {
    throw PreconditionError("unknown node " + std::to_string(node));
  }
  return impl_->misalignment(impl_->nodes[static_cast<std::size_t>(node)], t);
}

RunResult run(const ScenarioConfig& config) {
  Simulation sim(config);
  sim.finish();
  RunResult out;
  out.trace = sim.trace();
  out.sync_log = sim.sync_log();
  out.nodes = sim.nodes();
  out.counters = sim.counters();
  out.summary = summarize(out.trace, config.n_nodes, config.duration, config.warmup);
  return out;
}

}  // namespace saloha
