// SPDX-License-Identifier: Apache-2.0

#include "saloha/commands.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "saloha/errors.hpp"
#include "saloha/mac.hpp"
#include "saloha/phy_timing.hpp"
#include "saloha/report.hpp"
#include "saloha/scenario_file.hpp"
#include "saloha/simcore.hpp"
#include "saloha/sync.hpp"

namespace saloha {

namespace {

namespace fs = std::filesystem;

struct ProfileFlags {
  RadioProfile profile{7, 125'000, 1, 6, 101, true, true, false};
  bool implicit_header = false;
  bool no_crc = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--sf", profile.spreading_factor, "Spreading factor (6-12)")->capture_default_str();
    cmd.add_option("--bw", profile.bandwidth_hz, "Bandwidth in Hz")->capture_default_str();
    cmd.add_option("--cr", profile.coding_rate_index, "Coding rate index, 4/(4+cr)")
        ->capture_default_str();
    cmd.add_option("--preamble", profile.preamble_symbols, "Preamble symbols")->capture_default_str();
    cmd.add_option("--payload", profile.payload_bytes, "Payload bytes")->capture_default_str();
    cmd.add_flag("--implicit-header", implicit_header, "Implicit header mode");
    cmd.add_flag("--no-crc", no_crc, "Disable payload CRC");
    cmd.add_flag("--ldro", profile.low_data_rate_optimize, "Low data rate optimization");
  }

  RadioProfile resolve() const {
    RadioProfile p = profile;
    p.explicit_header = !implicit_header;
    p.crc_enabled = !no_crc;
    return p;
  }
};

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string duration;
  std::string warmup;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config, "Scenario file")->required();
    cmd.add_option("--seed", seed, "RNG seed (overrides the scenario)");
    cmd.add_option("--out", out, "Output directory")->capture_default_str();
    cmd.add_option("--duration", duration, "Simulated duration, e.g. 7d (overrides the scenario)");
    cmd.add_option("--warmup", warmup, "Warm-up cutoff, e.g. 1h (overrides the scenario)");
  }

  ScenarioFile load() const {
    ScenarioFile file = load_scenario(config);
    if (seed) {
      file.config.rng_seed = seed;
    }
    if (!duration.empty()) {
      file.config.duration = parse_duration(duration);
    }
    if (!warmup.empty()) {
      file.config.warmup = parse_duration(warmup);
    }
    return file;
  }
};

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  }
  return fs::path(dir);
}

std::string ratio_text(double pure, double slotted) {
  if (slotted == 0.0) {
    return pure == 0.0 ? "nan" : "inf";
  }
  return fmt::format("{:.3f}", pure / slotted);
}

void cmd_airtime(const ProfileFlags& flags, std::ostream& out) {
  const RadioProfile p = flags.resolve();
  out << fmt::format("symbol_time = {}\n", format_duration(symbol_time(p)));
  out << fmt::format("payload_symbols = {}\n", payload_symbol_count(p));
  out << fmt::format("time_on_air = {}\n", format_duration(time_on_air(p)));
  out << fmt::format("time_on_air_ms = {}\n",
                     exact_decimal(time_on_air(p), std::chrono::milliseconds{1}));
}

struct PlanFlags {
  std::string rx1 = "1s";
  std::string guard = "400ms";
  std::string rounding = "100ms";
  std::string residual = "15ms";
  double drift_bound_ppm = 80.0;
  int ack_payload = kAckPayloadBytes;
};

void cmd_plan_slot(const ProfileFlags& flags, const PlanFlags& pf, std::ostream& out) {
  const RadioProfile uplink = flags.resolve();
  const RadioProfile ack = ack_profile_for(uplink, pf.ack_payload);
  const Duration guard = parse_duration(pf.guard);
  const Duration u0 = parse_duration(pf.residual);
  const SlotPlan plan =
      plan_slot(uplink, ack, parse_duration(pf.rx1), guard, parse_duration(pf.rounding));
  out << fmt::format("uplink_airtime = {}\n", format_duration(time_on_air(uplink)));
  out << fmt::format("ack_airtime = {}\n", format_duration(time_on_air(ack)));
  out << fmt::format("t_r = {}\n", format_duration(plan.t_r));
  out << fmt::format("t_b = {}\n", format_duration(plan.t_b));
  out << fmt::format("t = {}\n", format_duration(plan.t));
  out << fmt::format("guard_ratio = {:.4f}\n",
                     static_cast<double>(plan.t_b.count()) / static_cast<double>(plan.t_r.count()));
  const Duration interval = max_resync_interval(guard, u0, pf.drift_bound_ppm);
  out << fmt::format("max_resync_interval = {} ({} min)\n", format_duration(interval),
                     exact_decimal(interval, std::chrono::minutes{1}));
}

struct DcFlags {
  double cap = 0.01;
  int n_min = 1;
  int n_max = 100;
  std::string policy = "both";
  std::string out = ".";
};

void cmd_dc_curve(const DcFlags& f, std::ostream& out) {
  if (f.n_min < 1 || f.n_max < f.n_min) {
    throw PreconditionError("dc-curve: need 1 <= n-min <= n-max");
  }
  std::vector<AccessKind> kinds;
  if (f.policy == "pure" || f.policy == "both") {
    kinds.push_back(AccessKind::pure);
  }
  if (f.policy == "slotted" || f.policy == "both") {
    kinds.push_back(AccessKind::slotted);
  }
  if (kinds.empty()) {
    throw PreconditionError("dc-curve: policy must be pure, slotted or both");
  }
  std::vector<int> ns;
  for (int n = f.n_min; n <= f.n_max; ++n) {
    ns.push_back(n);
  }
  const fs::path path = prepare_out_dir(f.out) / "dc_curve.csv";
  emit_dc_curve(kinds, ns, f.cap, path);
  out << "wrote " << path.string() << "\n";
  for (AccessKind k : kinds) {
    // Largest N still held at the regulatory cap.
    const auto crossover = static_cast<int>(std::floor(peak_throughput(k) / f.cap));
    out << fmt::format("{}: S_max = {:.4f}, flat at cap up to N = {}\n", to_string(k),
                       peak_throughput(k), crossover);
  }
  out << fmt::format(
      "reference figure, not reproduced: ~0.65% max DC for pure ALOHA at N = 20 "
      "(this model: {:.4f}%)\n",
      100.0 * max_node_dc(AccessKind::pure, 20, f.cap));
  out << fmt::format(
      "reference figure, not reproduced: >90 slotted devices at 0.56% DC "
      "(this model's ceiling: N = {})\n",
      static_cast<int>(std::floor(peak_throughput(AccessKind::slotted) / 0.0056)));
}

struct DriftFlags {
  std::vector<double> ppms{20.0, 40.0, 80.0};
  std::string horizon = "80min";
  std::string step = "1min";
  std::string out = ".";
};

void cmd_drift_curve(const DriftFlags& f, std::ostream& out) {
  const fs::path path = prepare_out_dir(f.out) / "drift_curve.csv";
  emit_drift_curve(f.ppms, parse_duration(f.horizon), parse_duration(f.step), path);
  out << "wrote " << path.string() << "\n";
}

void cmd_simulate(const RunFlags& f, std::ostream& out) {
  const ScenarioFile file = f.load();
  validate(file.config);
  const fs::path dir = prepare_out_dir(f.out);
  const RunResult result = run(file.config);
  emit_conflict_series(result.trace, dir / "trace.csv");
  const std::string summary = summary_text(file.config, result);
  write_file(dir / "summary.txt", summary);
  out << summary;
}

void cmd_compare(const RunFlags& f, int n_seeds, std::ostream& out) {
  ScenarioFile file = f.load();
  if (n_seeds < 1) {
    throw PreconditionError("compare: --seeds must be >= 1");
  }
  const ScenarioConfig pure = with_policy(file.config, PureAloha{});
  const ScenarioConfig slotted = with_policy(file.config, file.slotted);
  validate(pure);
  validate(slotted);
  const fs::path dir = prepare_out_dir(f.out);
  const std::uint64_t first = *file.config.rng_seed;

  std::string report = "# paired-seed comparison\n";
  report += fmt::format("config_hash = {:016x}\n", config_hash(slotted));
  report += fmt::format("slot_width = {}\n", format_duration(file.slotted.plan.t));
  report += fmt::format("warmup_cutoff = {}\n\n", format_duration(file.config.warmup));
  report += "seed,pure_steady,slotted_steady,ratio,pure_overall,slotted_overall,slotted_warmup\n";
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_seeds; ++i) {
    ScenarioConfig p = pure;
    ScenarioConfig s = slotted;
    p.rng_seed = first + static_cast<std::uint64_t>(i);
    s.rng_seed = p.rng_seed;
    const RunResult rp = run(p);
    const RunResult rs = run(s);
    if (i == 0) {
      emit_conflict_series(rp.trace, dir / "pure_trace.csv");
      emit_conflict_series(rs.trace, dir / "slotted_trace.csv");
    }
    const double ps = rp.summary.steady_state_collision_probability;
    const double ss = rs.summary.steady_state_collision_probability;
    const double ratio = ss == 0.0 ? std::numeric_limits<double>::infinity() : ps / ss;
    min_ratio = std::min(min_ratio, ratio);
    report += fmt::format("{},{:.6f},{:.6f},{},{:.6f},{:.6f},{:.6f}\n", *p.rng_seed, ps, ss,
                          ratio_text(ps, ss), rp.summary.collision_probability,
                          rs.summary.collision_probability,
                          rs.summary.warmup_collision_probability);
  }
  report += fmt::format("\nmin_ratio = {}\n",
                        std::isinf(min_ratio) ? std::string("inf") : fmt::format("{:.3f}", min_ratio));
  write_file(dir / "compare.txt", report);
  out << report;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slotted-ALOHA overlay simulator for LoRaWAN-class networks", "saloha"};
  app.require_subcommand(1);

  ProfileFlags airtime_flags;
  auto* airtime = app.add_subcommand("airtime", "Print LoRa time-on-air for a radio profile");
  airtime_flags.attach(*airtime);

  ProfileFlags plan_profile;
  PlanFlags plan_flags;
  auto* plan = app.add_subcommand("plan-slot", "Size the slot T = T_r + T_b for a profile");
  plan_profile.attach(*plan);
  plan->add_option("--rx1-delay", plan_flags.rx1, "Uplink end to RX1")->capture_default_str();
  plan->add_option("--guard", plan_flags.guard, "Guard interval T_b")->capture_default_str();
  plan->add_option("--rounding", plan_flags.rounding, "Round T up to this")->capture_default_str();
  plan->add_option("--residual", plan_flags.residual, "Post-sync uncertainty")->capture_default_str();
  plan->add_option("--drift-bound", plan_flags.drift_bound_ppm, "Crystal tolerance, ppm")
      ->capture_default_str();
  plan->add_option("--ack-payload", plan_flags.ack_payload, "ACK payload bytes")->capture_default_str();

  DcFlags dc_flags;
  auto* dc = app.add_subcommand("dc-curve", "Max per-node duty cycle versus network size");
  dc->add_option("--cap", dc_flags.cap, "Regulatory duty-cycle cap")->capture_default_str();
  dc->add_option("--n-min", dc_flags.n_min)->capture_default_str();
  dc->add_option("--n-max", dc_flags.n_max)->capture_default_str();
  dc->add_option("--policy", dc_flags.policy, "pure, slotted or both")->capture_default_str();
  dc->add_option("--out", dc_flags.out, "Output directory")->capture_default_str();

  DriftFlags drift_flags;
  auto* drift = app.add_subcommand("drift-curve", "Accumulated crystal error over time");
  drift->add_option("--ppm", drift_flags.ppms, "Crystal errors in ppm")->delimiter(',');
  drift->add_option("--horizon", drift_flags.horizon)->capture_default_str();
  drift->add_option("--step", drift_flags.step)->capture_default_str();
  drift->add_option("--out", drift_flags.out, "Output directory")->capture_default_str();

  RunFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Run a scenario; write trace.csv and summary.txt");
  sim_flags.attach(*sim);

  RunFlags cmp_flags;
  int n_seeds = 1;
  auto* cmp = app.add_subcommand("compare", "Paired-seed pure vs slotted runs of one scenario");
  cmp_flags.attach(*cmp);
  cmp->add_option("--seeds", n_seeds, "Number of consecutive seeds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*airtime) {
      cmd_airtime(airtime_flags, out);
    } else if (*plan) {
      cmd_plan_slot(plan_profile, plan_flags, out);
    } else if (*dc) {
      cmd_dc_curve(dc_flags, out);
    } else if (*drift) {
      cmd_drift_curve(drift_flags, out);
    } else if (*sim) {
      cmd_simulate(sim_flags, out);
    } else if (*cmp) {
      cmd_compare(cmp_flags, n_seeds, out);
    }
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GuardTooSmallError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace saloha
