// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "saloha/timebase.hpp"

namespace saloha {

/// Seedable random stream with platform-independent draws.
///
/// The engine is std::mt19937_64 and seeding goes through std::seed_seq, both
/// fully specified by the standard. Distributions come from Boost.Random,
/// whose algorithms are fixed in the header rather than left to the
/// standard library vendor.
class RngStream {
 public:
  /// Stream identified by (seed, node, purpose). Distinct triples give
  /// independent streams; nothing else feeds the state.
  RngStream(std::uint64_t seed, std::uint64_t node, std::string_view purpose);

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mean, double stddev);
  bool coin();

  /// Uniform duration in [lo, hi], whole nanoseconds.
  Duration uniform_duration(Duration lo, Duration hi) {
    return Duration{uniform_int(lo.count(), hi.count())};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saloha
