// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "saloha/errors.hpp"
#include "saloha/phy_timing.hpp"

using namespace saloha;
using namespace std::chrono_literals;

namespace {

RadioProfile sf7_101() { return RadioProfile{7, 125'000, 1, 6, 101, true, true, false}; }

RadioProfile random_profile(std::mt19937_64& gen) {
  const std::int64_t bws[] = {125'000, 250'000, 500'000};
  RadioProfile p;
  p.spreading_factor = std::uniform_int_distribution<int>{6, 12}(gen);
  p.bandwidth_hz = bws[std::uniform_int_distribution<int>{0, 2}(gen)];
  p.coding_rate_index = std::uniform_int_distribution<int>{1, 4}(gen);
  p.preamble_symbols = std::uniform_int_distribution<int>{1, 65'535}(gen) % 64 + 1;
  p.payload_bytes = std::uniform_int_distribution<int>{0, 255}(gen);
  p.explicit_header = gen() & 1U;
  p.crc_enabled = gen() & 1U;
  p.low_data_rate_optimize = gen() & 1U;
  return p;
}

}  // namespace

TEST_CASE("symbol_time") {
  CHECK(symbol_time({7, 125'000}) == 1024us);
  CHECK(symbol_time({9, 250'000}) == 2048us);
  CHECK(symbol_time({12, 125'000}) == 32768us);
}

TEST_CASE("time_on_air checkpoints") {
  // 8 + ceil((808 - 28 + 28 + 16) / 28) * 5 = 158 symbols.
  CHECK(payload_symbol_count(sf7_101()) == 158);
  CHECK(time_on_air(sf7_101()) == 172288us);

  const RadioProfile sf9{9, 250'000, 1, 6, 200, true, true, false};
  CHECK(time_on_air(sf9) == 498176us);

  RadioProfile doubled = sf9;
  doubled.bandwidth_hz = 500'000;
  CHECK(time_on_air(doubled) * 2 == time_on_air(sf9));

  const RadioProfile sf12{12, 125'000, 1, 8, 51, true, true, true};
  CHECK(time_on_air(sf12).count() == oracle::symbol_sum_airtime_ns(sf12));
  CHECK(time_on_air(sf12) == 2465792us);
}

TEST_CASE("profile validation") {
  RadioProfile p = sf7_101();
  p.payload_bytes = 256;
  CHECK_THROWS_AS(validate(p), PreconditionError);
  p = sf7_101();
  p.spreading_factor = 13;
  CHECK_THROWS_AS(time_on_air(p), PreconditionError);
  p = sf7_101();
  p.bandwidth_hz = 200'000;
  CHECK_THROWS_AS(symbol_time(p), PreconditionError);
  p = sf7_101();
  p.coding_rate_index = 0;
  CHECK_THROWS_AS(validate(p), PreconditionError);
  p = sf7_101();
  p.preamble_symbols = 0;
  CHECK_THROWS_AS(validate(p), PreconditionError);
}

TEST_CASE("ack profile keeps the radio settings") {
  const RadioProfile ack = ack_profile_for(sf7_101());
  CHECK(ack.payload_bytes == kAckPayloadBytes);
  CHECK(ack.spreading_factor == 7);
  CHECK(time_on_air(ack) == 44288us);
}

TEST_CASE("duty_cycle and min_period_for_dc") {
  CHECK(duty_cycle(167ms, 30s) == doctest::Approx(0.005567).epsilon(1e-3));
  CHECK(duty_cycle(0ns, 30s) == 0.0);
  CHECK(duty_cycle(546ms, 54600ms) == doctest::Approx(0.01));
  CHECK_THROWS_AS(duty_cycle(1ms, 0s), PreconditionError);
  CHECK_THROWS_AS(duty_cycle(1ms, -1s), PreconditionError);

  CHECK(min_period_for_dc(546ms, 0.01) == 54600ms);
  CHECK(min_period_for_dc(167ms, 0.0056) == 29821428572ns);
  CHECK(min_period_for_dc(172288us, 1.0) == 172288us);
  CHECK_THROWS_AS(min_period_for_dc(1ms, 0.0), PreconditionError);
  CHECK_THROWS_AS(min_period_for_dc(1ms, -0.5), PreconditionError);
}

TEST_CASE("property: airtime matches the symbol-sum oracle and grows with payload") {
  std::mt19937_64 gen{7};
  for (int i = 0; i < 5000; ++i) {
    RadioProfile p = random_profile(gen);
    REQUIRE(time_on_air(p).count() == oracle::symbol_sum_airtime_ns(p));
    if (p.payload_bytes < 255) {
      RadioProfile q = p;
      ++q.payload_bytes;
      REQUIRE(time_on_air(q) >= time_on_air(p));
    }
    if (p.bandwidth_hz < 500'000) {
      RadioProfile w = p;
      w.bandwidth_hz *= 2;
      REQUIRE(time_on_air(w) * 2 == time_on_air(p));
    }
    const double cap = std::uniform_real_distribution<double>{0.001, 1.0}(gen);
    // Round trip to the 1 ns resolution of the period.
    const Duration period = min_period_for_dc(time_on_air(p), cap);
    const double resolution = cap / static_cast<double>(period.count());
    REQUIRE(std::abs(duty_cycle(time_on_air(p), period) - cap) <= resolution + 1e-12);
    REQUIRE(duty_cycle(time_on_air(p), period + 1ns) < cap);
  }
}
