// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "saloha/errors.hpp"
#include "saloha/mac.hpp"
#include "saloha/sync.hpp"

using namespace saloha;
using namespace std::chrono_literals;

namespace {

const RadioProfile kSf9{9, 250'000, 1, 6, 200, true, true, false};
const RadioProfile kSf7{7, 125'000, 1, 6, 101, true, true, false};

SlottedAloha slotted(Duration t) { return SlottedAloha{SlotPlan{t - 400ms, 400ms, t}, BackoffPolicy{1}}; }

const SyncState kSynced{local_at(0s), 10ms, 80.0, true};

}  // namespace

TEST_CASE("plan_slot") {
  const SlotPlan p = plan_slot(kSf9, ack_profile_for(kSf9), 1s, 400ms, 100ms);
  // uplink 498.176 ms + RX1 1 s + ACK 78.336 ms.
  CHECK(p.t_r == 1576512us);
  CHECK(p.t_b == 400ms);
  CHECK(p.t == 2s);

  const SlotPlan q = plan_slot(kSf7, ack_profile_for(kSf7), 1s, 400ms, 100ms);
  CHECK(q.t_r == 1216576us);
  CHECK(q.t == 1700ms);

  const SlotPlan tight = plan_slot(kSf9, ack_profile_for(kSf9), 1s, 1ns, 0ns);
  CHECK(tight.t == tight.t_r + 1ns);

  CHECK_THROWS_AS(plan_slot(kSf9, ack_profile_for(kSf9), 1s, 0ns, 100ms), PreconditionError);
  CHECK_THROWS_AS(plan_slot(kSf9, ack_profile_for(kSf9), 0s, 400ms, 100ms), PreconditionError);
  CHECK_THROWS_AS(plan_slot(kSf9, ack_profile_for(kSf9), 1s, 400ms, -1ms), PreconditionError);
  CHECK_THROWS_AS(validate(SlotPlan{1s, 400ms, 1s}), PreconditionError);
}

TEST_CASE("required_guard") {
  CHECK(required_guard(15ms, 80.0, 4812500ms) == 400ms);
  CHECK(required_guard(15ms, 80.0, 0s) == 15ms);
  CHECK(required_guard(15ms, 500.0, 0s) == 15ms);
  CHECK(required_guard(10ms, 20.0, 3600s) == 82ms);
}

TEST_CASE("next_tx_time") {
  CHECK(next_tx_time(PureAloha{}, SyncState{}, local_at(12345ms), 0).at == local_at(12345ms));
  CHECK(next_tx_time(PureAloha{}, SyncState{}, local_at(12345ms), 0).slot_index == -1);

  const TxTiming a = next_tx_time(slotted(2s), kSynced, local_at(12345ms), 0);
  CHECK(a.at == local_at(14s));
  CHECK(a.slot_index == 7);
  CHECK(next_tx_time(slotted(2s), kSynced, local_at(14s), 0).at == local_at(14s));
  CHECK(next_tx_time(slotted(2s), kSynced, local_at(12345ms), 3).at == local_at(20s));
  CHECK(next_tx_time(slotted(2s), kSynced, local_at(-3s), 0).at == local_at(-2s));

  CHECK_THROWS_AS(next_tx_time(slotted(2s), SyncState{}, local_at(0s), 0), UnsynchronizedError);
}

TEST_CASE("throughput and max_node_dc") {
  CHECK(throughput(AccessKind::pure, 0.5) == doctest::Approx(0.1839).epsilon(1e-3));
  CHECK(throughput(AccessKind::slotted, 1.0) == doctest::Approx(0.3679).epsilon(1e-3));
  CHECK(throughput(AccessKind::pure, 0.0) == 0.0);
  CHECK(throughput(AccessKind::slotted, 0.0) == 0.0);

  CHECK(max_node_dc(AccessKind::pure, 20, 0.01) == doctest::Approx(0.0092).epsilon(1e-2));
  CHECK(max_node_dc(AccessKind::slotted, 20, 0.01) == 0.01);
  CHECK(max_node_dc(AccessKind::slotted, 100, 0.01) == doctest::Approx(0.003679).epsilon(1e-3));
  CHECK(max_node_dc(AccessKind::pure, 1, 0.01) == 0.01);
  CHECK_THROWS_AS(max_node_dc(AccessKind::pure, 0, 0.01), PreconditionError);
}

TEST_CASE("property: slotted start times sit on the grid within one slot of ready") {
  std::mt19937_64 gen{17};
  std::uniform_int_distribution<std::int64_t> ready{-1'000'000'000'000, 1'000'000'000'000};
  std::uniform_int_distribution<std::int64_t> width{1'000'000, 5'000'000'000};
  for (int i = 0; i < 100'000; ++i) {
    const Duration t{width(gen)};
    const LocalInstant r = local_at(Duration{ready(gen)});
    const TxTiming x = next_tx_time(slotted(t + 400ms), kSynced, r, 0);
    const Duration slot = t + 400ms;
    REQUIRE(x.at >= r);
    REQUIRE(x.at - r < slot);
    REQUIRE(x.at.time_since_epoch() % slot == 0ns);
    REQUIRE(x.at.time_since_epoch() == x.slot_index * slot);

    const int phase = static_cast<int>(gen() % 16);
    const TxTiming y = next_tx_time(slotted(slot), kSynced, r, phase);
    REQUIRE(y.at - x.at == phase * slot);
  }
}

TEST_CASE("property: throughput peaks and the slotted curve dominates") {
  double best_pure = -1.0;
  double best_slotted = -1.0;
  double g_pure = 0.0;
  double g_slotted = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double g = k * 1e-3;
    if (throughput(AccessKind::pure, g) > best_pure) {
      best_pure = throughput(AccessKind::pure, g);
      g_pure = g;
    }
    if (throughput(AccessKind::slotted, g) > best_slotted) {
      best_slotted = throughput(AccessKind::slotted, g);
      g_slotted = g;
    }
  }
  CHECK(g_pure == doctest::Approx(0.5));
  CHECK(g_slotted == doctest::Approx(1.0));
  CHECK(best_pure == doctest::Approx(1.0 / (2.0 * std::exp(1.0))));
  CHECK(best_slotted == doctest::Approx(1.0 / std::exp(1.0)));

  for (int n = 1; n <= 10'000; ++n) {
    REQUIRE(max_node_dc(AccessKind::slotted, n, 0.01) >= max_node_dc(AccessKind::pure, n, 0.01));
  }
  CHECK(max_node_dc(AccessKind::slotted, 10'000, 0.01) / max_node_dc(AccessKind::pure, 10'000, 0.01) ==
        doctest::Approx(2.0));
}
