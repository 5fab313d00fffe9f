// SPDX-License-Identifier: Apache-2.0

/**
 * @file metrics.hpp
 * @brief Collision statistics derived from a transmission trace.
 *
 * Every number here is recomputed from the trace; the simulator keeps no
 * separate tallies.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "saloha/timebase.hpp"
#include "saloha/trace.hpp"

namespace saloha {

struct NodeTotals {
  int node_id = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t conflicts = 0;
};

struct Metrics {
  std::uint64_t transmissions = 0;
  std::uint64_t conflicts = 0;
  double collision_probability = 0.0;
  /// Successfully delivered airtime over elapsed time.
  double throughput_fraction = 0.0;
  std::vector<NodeTotals> per_node;

  Duration elapsed{0};
  Duration warmup_cutoff{0};
  std::uint64_t warmup_transmissions = 0;
  std::uint64_t warmup_conflicts = 0;
  double warmup_collision_probability = 0.0;
  std::uint64_t steady_transmissions = 0;
  std::uint64_t steady_conflicts = 0;
  double steady_state_collision_probability = 0.0;
};

/// conflicts / transmissions. Throws NoDataError when transmissions is zero.
double collision_probability(std::uint64_t transmissions, std::uint64_t conflicts);

/// Fraction of collided records. Throws NoDataError on an empty trace.
double collision_probability(std::span<const TransmissionRecord> trace);

/// Records with true_start before `warmup` count as warm-up. Sub-ranges
/// without records report a probability of 0. `n_nodes` sizes per_node.
Metrics summarize(std::span<const TransmissionRecord> trace, int n_nodes, Duration elapsed,
                  Duration warmup);

}  // namespace saloha
