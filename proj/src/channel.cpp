// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "saloha/errors.hpp"
#include "saloha/simcore.hpp"

namespace saloha {

bool conflicts(const Transmission& a, const Transmission& b) {
  return a.channel == b.channel && a.start < b.end() && b.start < a.end();
}

std::vector<bool> channel_arbitrate(std::span<const Transmission> active) {
  std::vector<bool> collided(active.size(), false);
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      if (conflicts(active[i], active[j])) {
        collided[i] = true;
        collided[j] = true;
      }
    }
  }
  return collided;
}

Duration airtime_in_window(std::span<const AirtimeUse> history, TrueInstant window_end,
                           Duration window) {
  const TrueInstant window_start = window_end - window;
  Duration total{0};
  for (const auto& use : history) {
    const TrueInstant lo = std::max(use.start, window_start);
    const TrueInstant hi = std::min(use.start + use.duration, window_end);
    if (lo < hi) {
      total += hi - lo;
    }
  }
  return total;
}

DutyCycleDecision enforce_duty_cycle(std::span<const AirtimeUse> history,
                                     const Transmission& proposed, double cap, Duration window) {
  if (!(cap > 0.0) || cap > 1.0) {
    throw PreconditionError("enforce_duty_cycle: cap must lie in (0, 1]");
  }
  if (window <= Duration{0}) {
    throw PreconditionError("enforce_duty_cycle: window must be positive");
  }
  const Duration budget{
      std::llround(static_cast<long double>(cap) * static_cast<long double>(window.count()))};
  const Duration d = proposed.duration;
  if (d > budget) {
    throw PreconditionError("enforce_duty_cycle: a single transmission exceeds the window budget");
  }
  auto fits = [&](TrueInstant start) {
    return airtime_in_window(history, start + d, window) + d <= budget;
  };
  if (fits(proposed.start)) {
    return {};
  }
  // Window occupancy only drops as the start moves later; bisect for the first legal start.
  TrueInstant lo = proposed.start;  // not legal
  TrueInstant hi = proposed.start + window;
  while (!fits(hi)) {
    hi += window;
  }
  while (hi - lo > Duration{1}) {
    const TrueInstant mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return DutyCycleDecision{hi};
}

}  // namespace saloha
