// SPDX-License-Identifier: Apache-2.0

#include "saloha/metrics.hpp"

#include "saloha/errors.hpp"

namespace saloha {

namespace {

double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double collision_probability(std::uint64_t transmissions, std::uint64_t conflicts) {
  if (transmissions == 0) {
    throw NoDataError();
  }
  if (conflicts > transmissions) {
    throw PreconditionError("collision_probability: more conflicts than transmissions");
  }
  return static_cast<double>(conflicts) / static_cast<double>(transmissions);
}

double collision_probability(std::span<const TransmissionRecord> trace) {
  std::uint64_t conflicts = 0;
  for (const auto& r : trace) {
    conflicts += r.collided ? 1 : 0;
  }
  return collision_probability(trace.size(), conflicts);
}

Metrics summarize(std::span<const TransmissionRecord> trace, int n_nodes, Duration elapsed,
                  Duration warmup) {
  Metrics m;
  m.elapsed = elapsed;
  m.warmup_cutoff = warmup;
  m.per_node.resize(n_nodes > 0 ? static_cast<std::size_t>(n_nodes) : 0);
  for (std::size_t i = 0; i < m.per_node.size(); ++i) {
    m.per_node[i].node_id = static_cast<int>(i);
  }

  Duration delivered{0};
  const TrueInstant cutoff{warmup};
  for (const auto& r : trace) {
    const std::uint64_t hit = r.collided ? 1 : 0;
    ++m.transmissions;
    m.conflicts += hit;
    if (!r.collided) {
      delivered += r.duration;
    }
    if (r.true_start < cutoff) {
      ++m.warmup_transmissions;
      m.warmup_conflicts += hit;
    } else {
      ++m.steady_transmissions;
      m.steady_conflicts += hit;
    }
    if (r.node_id >= 0 && static_cast<std::size_t>(r.node_id) < m.per_node.size()) {
      auto& n = m.per_node[static_cast<std::size_t>(r.node_id)];
      ++n.transmissions;
      n.conflicts += hit;
    }
  }
  m.collision_probability = ratio_or_zero(m.conflicts, m.transmissions);
  m.warmup_collision_probability = ratio_or_zero(m.warmup_conflicts, m.warmup_transmissions);
  m.steady_state_collision_probability = ratio_or_zero(m.steady_conflicts, m.steady_transmissions);
  m.throughput_fraction = elapsed > Duration{0} ? static_cast<double>(delivered.count()) /
                                                      static_cast<double>(elapsed.count())
                                                : 0.0;
  return m;
}

}  // namespace saloha
