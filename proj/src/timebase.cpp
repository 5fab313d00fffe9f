// SPDX-License-Identifier: Apache-2.0

#include "saloha/timebase.hpp"

#include <cmath>
#include <string>

#include "saloha/errors.hpp"

namespace saloha {

namespace {

__extension__ typedef __int128 i128;

// num / den rounded half away from zero; den > 0.
std::int64_t div_round_half_away(i128 num, i128 den) {
  const bool negative = num < 0;
  const i128 mag = negative ? -num : num;
  const i128 q = (2 * mag + den) / (2 * den);
  return static_cast<std::int64_t>(negative ? -q : q);
}

}  // namespace

ClockModel::ClockModel(double drift_ppm, Duration initial_offset, TrueInstant epoch)
    : drift_ppm_(drift_ppm), initial_offset_(initial_offset), epoch_(epoch) {
  if (!std::isfinite(drift_ppm) || std::fabs(drift_ppm) > kMaxDriftPpm) {
    throw PreconditionError("clock drift must be finite and within +/-" +
                            std::to_string(kMaxDriftPpm) + " ppm, got " +
                            std::to_string(drift_ppm));
  }
}

Duration scale_by_ppm(Duration elapsed, double ppm) {
  if (!std::isfinite(ppm) || std::fabs(ppm) >= 1048576.0) {
    throw PreconditionError("ppm factor out of range: " + std::to_string(ppm));
  }
  if (ppm == 0.0 || elapsed.count() == 0) {
    return Duration{0};
  }
  int exp2 = 0;
  const double frac = std::frexp(ppm, &exp2);
  // ppm == mant * 2^(exp2 - 53) exactly.
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int shift = 53 - exp2;  // > 0 given the range check above
  if (shift > 97) {
    return Duration{0};  // |result| < 0.5 ns for any int64 elapsed
  }
  const i128 num = static_cast<i128>(elapsed.count()) * mant;
  const i128 den = static_cast<i128>(1'000'000) << shift;
  return Duration{div_round_half_away(num, den)};
}

LocalInstant local_now(const ClockModel& clock, Duration corrections, TrueInstant t) {
  if (t < clock.epoch()) {
    throw PreconditionError("local_now: true time precedes the clock epoch");
  }
  const Duration elapsed = t - clock.epoch();
  return LocalInstant{t.time_since_epoch() + clock.initial_offset() + corrections +
                      scale_by_ppm(elapsed, clock.drift_ppm())};
}

TrueInstant true_time_of(const ClockModel& clock, Duration corrections, LocalInstant target) {
  const Duration local_elapsed = target.time_since_epoch() - clock.epoch().time_since_epoch() -
                                 clock.initial_offset() - corrections;
  if (local_elapsed <= Duration{0}) {
    return clock.epoch();
  }
  auto forward = [&](std::int64_t e) {
    return e + scale_by_ppm(Duration{e}, clock.drift_ppm()).count();
  };
  const long double rate = 1.0L + static_cast<long double>(clock.drift_ppm()) * 1e-6L;
  auto e = static_cast<std::int64_t>(std::floor(static_cast<long double>(local_elapsed.count()) / rate));
  // The float guess is within a few ns; settle on the smallest e with forward(e) >= target.
  while (e > 0 && forward(e - 1) >= local_elapsed.count()) {
    --e;
  }
  while (forward(e) < local_elapsed.count()) {
    ++e;
  }
  return clock.epoch() + Duration{e};
}

Duration drift_error(double drift_ppm, Duration elapsed) {
  if (elapsed < Duration{0}) {
    throw PreconditionError("drift_error: elapsed must be non-negative");
  }
  return scale_by_ppm(elapsed, std::fabs(drift_ppm));
}

}  // namespace saloha
