// SPDX-License-Identifier: Apache-2.0

/**
 * @file timebase.hpp
 * @brief True simulation time and drifting per-node real-time clocks.
 *
 * Every time quantity is an integer count of nanoseconds. Two distinct
 * clock tags keep instants on the reference timeline (`TrueInstant`, which
 * is also the gateway's drift-free clock) from being mixed up with readings
 * of a node's RTC (`LocalInstant`).
 */

#pragma once

#include <chrono>
#include <cstdint>

namespace saloha {

using Duration = std::chrono::nanoseconds;

/// Clock tag for the reference timeline. Only used to brand time points.
struct TrueClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = Duration;
  static constexpr bool is_steady = true;
};

/// Clock tag for a node RTC reading.
struct LocalClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = Duration;
  static constexpr bool is_steady = true;
};

using TrueInstant = std::chrono::time_point<TrueClock, Duration>;
using LocalInstant = std::chrono::time_point<LocalClock, Duration>;

constexpr TrueInstant true_at(Duration since_epoch) { return TrueInstant{since_epoch}; }
constexpr LocalInstant local_at(Duration since_epoch) { return LocalInstant{since_epoch}; }

/// Largest accepted crystal error magnitude.
inline constexpr double kMaxDriftPpm = 500.0;

/// Oscillator model of one node: constant frequency error plus a start offset.
class ClockModel {
 public:
  /// Throws PreconditionError when |drift_ppm| exceeds kMaxDriftPpm or is not finite.
  ClockModel(double drift_ppm, Duration initial_offset, TrueInstant epoch = TrueInstant{});

  double drift_ppm() const { return drift_ppm_; }
  Duration initial_offset() const { return initial_offset_; }
  TrueInstant epoch() const { return epoch_; }

 private:
  double drift_ppm_;
  Duration initial_offset_;
  TrueInstant epoch_;
};

/// Exact `elapsed * ppm * 1e-6`, rounded half away from zero to whole nanoseconds.
///
/// The double is decomposed into its exact binary rational and the product is
/// formed in 128-bit integers, so results do not depend on FPU behavior.
Duration scale_by_ppm(Duration elapsed, double ppm);

/// RTC reading of `clock` at true time `t`: t + offset + corrections + drift since epoch.
/// Throws PreconditionError when `t` precedes the clock's epoch.
LocalInstant local_now(const ClockModel& clock, Duration corrections, TrueInstant t);

/// Earliest true instant at which `local_now` reaches `target`.
/// Returns the clock epoch when the target is already reached there.
TrueInstant true_time_of(const ClockModel& clock, Duration corrections, LocalInstant target);

/// Worst-case accumulated error of a crystal with |drift_ppm| over `elapsed`.
Duration drift_error(double drift_ppm, Duration elapsed);

/// Corrections accumulator after stepping the RTC by `delta`.
constexpr Duration apply_correction(Duration corrections, Duration delta) {
  return corrections + delta;
}

}  // namespace saloha
