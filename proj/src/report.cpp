// SPDX-License-Identifier: Apache-2.0

#include "saloha/report.hpp"

#include <fstream>

#include <fmt/format.h>

#include "saloha/errors.hpp"
#include "saloha/scenario_file.hpp"

namespace saloha {

std::string exact_decimal(Duration value, Duration unit) {
  const std::int64_t v = value.count();
  const std::int64_t u = unit.count();
  const std::int64_t mag = v < 0 ? -v : v;
  std::string out = fmt::format("{}{}", v < 0 ? "-" : "", mag / u);
  std::int64_t rem = mag % u;
  if (rem != 0) {
    out += '.';
    for (std::int64_t scale = u / 10; rem != 0 && scale > 0; scale /= 10) {
      out += static_cast<char>('0' + rem / scale);
      rem %= scale;
    }
  }
  return out;
}

std::string conflict_series_csv(std::span<const TransmissionRecord> trace) {
  std::string out = "index,node_id,true_start_ns,slot_index,channel,conflict\n";
  out.reserve(out.size() + trace.size() * 40);
  for (const auto& r : trace) {
    out += fmt::format("{},{},{},{},{},{}\n", r.index, r.node_id, r.true_start.time_since_epoch().count(),
                       r.slot_index ? fmt::format("{}", *r.slot_index) : std::string{}, r.channel,
                       r.collided ? 1 : 0);
  }
  return out;
}

void emit_conflict_series(std::span<const TransmissionRecord> trace,
                          const std::filesystem::path& path) {
  write_file(path, conflict_series_csv(trace));
}

std::string dc_curve_csv(std::span<const AccessKind> policies, std::span<const int> n_values,
                         double cap) {
  if (n_values.empty()) {
    throw PreconditionError("dc curve: node range is empty");
  }
  std::string out = "n_nodes,policy,max_dc\n";
  for (int n : n_values) {
    for (AccessKind kind : policies) {
      out += fmt::format("{},{},{:.8f}\n", n, to_string(kind), max_node_dc(kind, n, cap));
    }
  }
  return out;
}

void emit_dc_curve(std::span<const AccessKind> policies, std::span<const int> n_values, double cap,
                   const std::filesystem::path& path) {
  write_file(path, dc_curve_csv(policies, n_values, cap));
}

std::string drift_curve_csv(std::span<const double> ppms, Duration horizon, Duration step) {
  if (horizon <= Duration{0} || step <= Duration{0}) {
    throw PreconditionError("drift curve: horizon and step must be positive");
  }
  std::string out = "elapsed_s,ppm,error_ms\n";
  for (double ppm : ppms) {
    for (Duration t{0}; t <= horizon; t += step) {
      out += fmt::format("{},{},{}\n", exact_decimal(t, std::chrono::seconds{1}), ppm,
                         exact_decimal(drift_error(ppm, t), std::chrono::milliseconds{1}));
    }
  }
  return out;
}

void emit_drift_curve(std::span<const double> ppms, Duration horizon, Duration step,
                      const std::filesystem::path& path) {
  write_file(path, drift_curve_csv(ppms, horizon, step));
}

std::string summary_text(const ScenarioConfig& config, const RunResult& result) {
  const Metrics& m = result.summary;
  std::uint64_t acked = 0;
  for (const auto& r : result.trace) {
    acked += r.acked ? 1 : 0;
  }
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "# run summary\n";
  line("config_hash", fmt::format("{:016x}", config_hash(config)));
  line("seed", config.rng_seed ? fmt::format("{}", *config.rng_seed) : std::string("unset"));
  if (const auto* s = std::get_if<SlottedAloha>(&config.policy)) {
    line("policy", "slotted");
    line("slot_width", format_duration(s->plan.t));
    line("slot_t_r", format_duration(s->plan.t_r));
    line("slot_t_b", format_duration(s->plan.t_b));
  } else {
    line("policy", "pure");
  }
  line("nodes", config.n_nodes);
  line("channels", config.n_channels);
  line("channel_selection", to_string(config.channel_selection));
  line("app_period", format_duration(config.app_period));
  line("uplink_airtime", format_duration(time_on_air(config.uplink_profile)));
  line("node_duty_cycle", fmt::format("{:.6f}", duty_cycle(time_on_air(config.uplink_profile),
                                                           config.app_period)));
  line("duration", format_duration(config.duration));
  line("warmup_cutoff", format_duration(m.warmup_cutoff));
  line("warmup_cutoff_ns", m.warmup_cutoff.count());
  out += "\n";
  line("transmissions", m.transmissions);
  line("conflicts", m.conflicts);
  line("collision_probability", fmt::format("{:.6f}", m.collision_probability));
  line("steady_state_transmissions", m.steady_transmissions);
  line("steady_state_conflicts", m.steady_conflicts);
  line("steady_state_collision_probability",
       fmt::format("{:.6f}", m.steady_state_collision_probability));
  line("warmup_transmissions", m.warmup_transmissions);
  line("warmup_conflicts", m.warmup_conflicts);
  line("warmup_collision_probability", fmt::format("{:.6f}", m.warmup_collision_probability));
  line("throughput_fraction", fmt::format("{:.6f}", m.throughput_fraction));
  line("acked", acked);
  line("sync_exchanges", result.sync_log.size());
  line("data_ready", result.counters.data_ready);
  line("pending_at_end", result.counters.pending_at_end);
  line("duty_cycle_deferrals", result.counters.duty_cycle_deferrals);
  line("gateway_ack_airtime_ns", result.counters.gateway_ack_airtime.count());
  out += "\n[per_node]\nnode_id,transmissions,conflicts\n";
  for (const auto& n : m.per_node) {
    out += fmt::format("{},{},{}\n", n.node_id, n.transmissions, n.conflicts);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

}  // namespace saloha
