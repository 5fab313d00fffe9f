// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "saloha/errors.hpp"
#include "saloha/mac.hpp"
#include "saloha/simcore.hpp"
#include "saloha/sync.hpp"

using namespace saloha;
using namespace std::chrono_literals;

namespace {

SyncState synced_at(LocalInstant at, Duration u0, double ppm = 80.0) {
  return SyncState{at, u0, ppm, true};
}

}  // namespace

TEST_CASE("timestamps on both sides") {
  static_assert(node_record_tx_end(local_at(1000s)) == local_at(1000s));
  CHECK(gateway_record_rx_end(true_at(10s), 0ns) == true_at(10s));
  CHECK(gateway_record_rx_end(true_at(10s), 20us) == true_at(10s + 20us));
  CHECK(gateway_record_rx_end(true_at(10s), -20us) == true_at(10s - 20us));
  CHECK_THROWS_AS(gateway_record_rx_end(true_at(10s), 21us), ContractViolation);
  CHECK_THROWS_AS(gateway_record_rx_end(true_at(10s), -20001ns), ContractViolation);

  // A stored reading taken after a correction reflects the corrected RTC.
  const ClockModel clock{40.0, 3s};
  const Duration corr = apply_correction(0ns, -3s);
  CHECK(node_record_tx_end(local_now(clock, corr, true_at(1000s))) == local_at(1000s + 40ms));
  CHECK(node_record_tx_end(local_now(clock, corr, true_at(1000s))) <
        node_record_tx_end(local_now(clock, corr, true_at(1030s))));
}

TEST_CASE("compute_offset") {
  static_assert(compute_offset(local_at(1000s), true_at(1002500ms)) == 2500ms);
  static_assert(compute_offset(local_at(1000s), true_at(1000s)) == 0ns);
  static_assert(compute_offset(local_at(1000010ms), true_at(1000s)) == -10ms);
}

TEST_CASE("apply_sync") {
  const SyncResult first = apply_sync(SyncState{}, 0ns, 2500ms, 10ms, local_at(1000s));
  CHECK(first.state.synced);
  CHECK(first.state.uncertainty_at_sync == 10ms);
  CHECK(first.corrections == 2510ms);
  CHECK(first.state.last_sync_local == local_at(1000s));

  const SyncResult second = apply_sync(synced_at(local_at(0s), 3ms), 1s, 0ns, -15ms, local_at(50s));
  CHECK(second.state.uncertainty_at_sync == 15ms);
  CHECK(second.corrections == 1s - 15ms);

  CHECK_THROWS_AS(apply_sync(SyncState{}, 0ns, 0ns, 15001us, local_at(0s)), ContractViolation);
  CHECK_THROWS_AS(apply_sync(SyncState{}, 0ns, 0ns, -16ms, local_at(0s)), ContractViolation);
}

TEST_CASE("current_uncertainty") {
  const SyncState s = synced_at(local_at(100s), 15ms);
  CHECK(current_uncertainty(s, local_at(100s)) == 15ms);
  CHECK(current_uncertainty(s, local_at(100s + 4812500ms)) == 400ms);
  CHECK(current_uncertainty(synced_at(local_at(0s), 10ms, 20.0), local_at(1000s)) == 30ms);
  CHECK_THROWS_AS(current_uncertainty(SyncState{}, local_at(0s)), UnsynchronizedError);
}

TEST_CASE("needs_resync") {
  const SyncState s = synced_at(local_at(0s), 15ms);
  // 399 ms of uncertainty after 4800 s; 400 ms at 4812.5 s.
  CHECK_FALSE(needs_resync(s, local_at(4800s), 400ms));
  CHECK(current_uncertainty(s, local_at(4800s)) == 399ms);
  CHECK(needs_resync(s, local_at(4812500ms), 400ms));
  CHECK(needs_resync(SyncState{}, local_at(0s), 400ms));
  CHECK_THROWS_AS(needs_resync(s, local_at(0s), 0ns), PreconditionError);
}

TEST_CASE("max_resync_interval") {
  CHECK(max_resync_interval(400ms, 15ms, 80.0) == 4812500ms);
  CHECK(max_resync_interval(400ms, 15ms, 40.0) == 9625s);
  CHECK(max_resync_interval(15ms + 80us, 15ms, 80.0) == 1s);
  CHECK(max_resync_interval(15ms + 1ns, 15ms, 80.0) == 12500ns);
  CHECK_THROWS_AS(max_resync_interval(15ms, 15ms, 80.0), GuardTooSmallError);
  CHECK_THROWS_AS(max_resync_interval(10ms, 15ms, 80.0), GuardTooSmallError);
  CHECK_THROWS_AS(max_resync_interval(400ms, 15ms, 0.0), PreconditionError);
}

TEST_CASE("SyncAck wire format") {
  const SyncAck ack = make_sync_ack(true_at(1002500123us));
  CHECK(ack.gateway_timestamp_us == 1002500123U);
  CHECK(ack.gateway_time() == true_at(1002500123us));
  const auto bytes = SyncAck{0x0102030405060708ULL}.serialize();
  CHECK(bytes[0] == 0x08);
  CHECK(bytes[7] == 0x01);
  const std::uint8_t short_frame[7] = {};
  CHECK_THROWS(SyncAck::deserialize(short_frame));
  CHECK_THROWS(make_sync_ack(true_at(1500ns)));
}

TEST_CASE("property: SyncAck round-trips") {
  std::mt19937_64 gen{11};
  for (int i = 0; i < 1'000'000; ++i) {
    const SyncAck ack{gen()};
    const auto wire = ack.serialize();
    REQUIRE(SyncAck::deserialize(wire) == ack);
  }
}

TEST_CASE("property: a second exact sync right after the first finds no offset") {
  std::mt19937_64 gen{3};
  std::uniform_int_distribution<std::int64_t> off{-5'000'000'000, 5'000'000'000};
  for (int i = 0; i < 10'000; ++i) {
    const ClockModel clock{0.0, Duration{off(gen)}};
    const TrueInstant t = true_at(Duration{std::abs(off(gen))});
    const LocalInstant tx = local_now(clock, 0ns, t);
    const SyncResult r = apply_sync(SyncState{}, 0ns, compute_offset(tx, t), 0ns, tx);
    const LocalInstant again = local_now(clock, r.corrections, t);
    REQUIRE(compute_offset(again, t) == 0ns);
  }
}

TEST_CASE("property: required_guard and max_resync_interval are inverses") {
  std::mt19937_64 gen{5};
  std::uniform_real_distribution<double> ppm{1.0, 500.0};
  std::uniform_int_distribution<std::int64_t> u{0, 15'000'000};
  std::uniform_int_distribution<std::int64_t> interval{0, 86'400'000'000'000};
  for (int i = 0; i < 100'000; ++i) {
    const double p = ppm(gen);
    const Duration u0{u(gen)};
    const Duration iv{interval(gen)};
    const Duration g = required_guard(u0, p, iv);
    if (g <= u0) {
      continue;
    }
    // The guard is whole ns, so half a ns of rounding scales by 1 / (ppm * 1e-6).
    const Duration back = max_resync_interval(g, u0, p);
    const auto quantization = static_cast<std::int64_t>(std::ceil(0.5e6 / p));
    REQUIRE(std::chrono::abs(back - iv) <= 1us + Duration{quantization});
  }
  std::uniform_int_distribution<int> whole_ppm{1, 500};
  std::uniform_int_distribution<std::int64_t> whole_ms{0, 86'400'000};
  for (int i = 0; i < 100'000; ++i) {
    const auto p = static_cast<double>(whole_ppm(gen));
    const Duration u0{u(gen)};
    const Duration iv = std::chrono::milliseconds{whole_ms(gen)} + 1ms;
    REQUIRE(std::chrono::abs(max_resync_interval(required_guard(u0, p, iv), u0, p) - iv) <= 1us);
  }
}

TEST_CASE("property: misalignment stays inside the uncertainty between syncs") {
  // Simulated ground truth against the node's own bound. The bound is read
  // on the corrected clock; the gateway timestamp error (20 us) sits on top.
  ScenarioConfig cfg;
  cfg.n_nodes = 1;
  cfg.app_period = 10min;
  cfg.uplink_profile = RadioProfile{9, 250'000, 1, 6, 200, true, true, false};
  cfg.ack_profile = ack_profile_for(cfg.uplink_profile);
  cfg.confirm = ConfirmMode::resync;
  cfg.duration = 24h;
  cfg.warmup = 0s;
  cfg.policy = SlottedAloha{plan_slot(cfg.uplink_profile, cfg.ack_profile, 1s, 400ms, 100ms),
                            BackoffPolicy{1}};
  const Duration slack = kAckTimestampError + 1us;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    cfg.rng_seed = seed;
    Simulation sim{cfg};
    for (TrueInstant t = true_at(0s); t < true_at(24h); t += 7min) {
      sim.run_until(t);
      const SyncState s = sim.sync_state(0);
      if (!s.synced) {
        continue;
      }
      const Duration m = std::chrono::abs(sim.ground_truth_misalignment(0, sim.now()));
      const LocalInstant local = local_at(sim.now().time_since_epoch() + sim.ground_truth_misalignment(0, sim.now()));
      REQUIRE(m <= current_uncertainty(s, local) + slack);
      REQUIRE(m < cfg.guard);
    }
    sim.finish();
    for (const SyncEvent& ev : sim.sync_log()) {
      REQUIRE(std::chrono::abs(ev.misalignment_at_reference) <= std::chrono::abs(ev.residual) + kAckTimestampError);
    }
  }
}
