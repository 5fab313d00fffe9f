// SPDX-License-Identifier: Apache-2.0

#include "saloha/scenario_file.hpp"

#include <array>
#include <fstream>
#include <limits>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "saloha/errors.hpp"

namespace saloha {

namespace {

struct Unit {
  std::string_view suffix;
  std::int64_t ns;
};

// Largest first, for format_duration.
constexpr std::array<Unit, 7> kUnits{{{"d", 86'400'000'000'000},
                                      {"h", 3'600'000'000'000},
                                      {"min", 60'000'000'000},
                                      {"s", 1'000'000'000},
                                      {"ms", 1'000'000},
                                      {"us", 1'000},
                                      {"ns", 1}}};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario",
       {"nodes", "period", "jitter", "duration", "warmup", "seed", "channels",
        "channel_selection", "confirm", "initial_offset", "drift_ppm_min", "drift_ppm_max"}},
      {"uplink",
       {"sf", "bandwidth", "coding_rate", "preamble", "payload", "explicit_header", "crc", "ldro"}},
      {"ack",
       {"sf", "bandwidth", "coding_rate", "preamble", "payload", "explicit_header", "crc", "ldro"}},
      {"mac", {"policy", "rx1_delay", "guard", "rounding", "slot", "max_phase_slots"}},
      {"sync", {"drift_bound_ppm", "residual_mean", "residual_stddev", "residual_max"}},
      {"duty_cycle", {"cap", "window"}},
  };
  return keys;
}

using boost::property_tree::ptree;

// Reads typed values out of a ptree, collecting every failure instead of stopping at the first.
class Reader {
 public:
  explicit Reader(const ptree& root) : root_(root) {}

  std::vector<std::string>& errors() { return errors_; }

  const std::string* raw(const std::string& section, const std::string& key) const {
    const auto sec = root_.get_child_optional(section);
    if (!sec) {
      return nullptr;
    }
    const auto it = sec->find(key);
    if (it == sec->not_found()) {
      return nullptr;
    }
    return &it->second.data();
  }

  template <typename T, typename Parse>
  void read(const std::string& section, const std::string& key, T& out, Parse parse) {
    const std::string* text = raw(section, key);
    if (text == nullptr) {
      return;
    }
    try {
      out = parse(trim(*text));
    } catch (const std::exception& e) {
      errors_.push_back(fmt::format("[{}] {}: {}", section, key, e.what()));
    }
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

 private:
  const ptree& root_;
  std::vector<std::string> errors_;
};

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) {
    throw PreconditionError("not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') {
    throw PreconditionError("not an unsigned integer: '" + s + "'");
  }
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used, 0);
  if (used != s.size()) {
    throw PreconditionError("not an unsigned integer: '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) {
    throw PreconditionError("not a number: '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") {
    return true;
  }
  if (s == "false" || s == "no" || s == "0") {
    return false;
  }
  throw PreconditionError("not a boolean: '" + s + "'");
}

int parse_small_int(const std::string& s) { return static_cast<int>(parse_int(s)); }

Duration parse_duration_str(const std::string& s) { return parse_duration(s); }

void read_profile(Reader& r, const std::string& section, RadioProfile& p) {
  r.read(section, "sf", p.spreading_factor, parse_small_int);
  r.read(section, "bandwidth", p.bandwidth_hz, parse_int);
  r.read(section, "coding_rate", p.coding_rate_index, parse_small_int);
  r.read(section, "preamble", p.preamble_symbols, parse_small_int);
  r.read(section, "payload", p.payload_bytes, parse_small_int);
  r.read(section, "explicit_header", p.explicit_header, parse_bool);
  r.read(section, "crc", p.crc_enabled, parse_bool);
  r.read(section, "ldro", p.low_data_rate_optimize, parse_bool);
}

std::string profile_line(const RadioProfile& p) {
  return fmt::format("sf={} bw={} cr={} preamble={} payload={} explicit_header={} crc={} ldro={}",
                     p.spreading_factor, p.bandwidth_hz, p.coding_rate_index, p.preamble_symbols,
                     p.payload_bytes, p.explicit_header, p.crc_enabled, p.low_data_rate_optimize);
}

}  // namespace

Duration parse_duration(std::string_view text) {
  static const std::regex pattern(R"(^\s*(\d+)(?:\.(\d+))?\s*(ns|us|ms|s|min|h|d)\s*$)");
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) {
    throw PreconditionError("not a duration (expected e.g. 400ms, 1.5s, 7d): '" + s + "'");
  }
  std::int64_t unit = 0;
  for (const auto& u : kUnits) {
    if (u.suffix == m[3].str()) {
      unit = u.ns;
    }
  }
  const std::string whole = m[1].str();
  const std::string frac = m[2].matched ? m[2].str() : std::string{};
  if (whole.size() > 12 || frac.size() > 15) {
    throw PreconditionError("duration out of range: '" + s + "'");
  }
  const std::int64_t count = std::stoll(whole);
  if (count > (std::numeric_limits<std::int64_t>::max() - unit) / unit) {
    throw PreconditionError("duration out of range: '" + s + "'");
  }
  std::int64_t ns = count * unit;
  if (!frac.empty()) {
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) {
      scale *= 10;
    }
    __extension__ typedef __int128 i128;
    const i128 num = static_cast<i128>(std::stoll(frac)) * unit;
    if (num % scale != 0) {
      throw PreconditionError("duration is not a whole number of nanoseconds: '" + s + "'");
    }
    ns += static_cast<std::int64_t>(num / scale);
  }
  return Duration{ns};
}

std::string format_duration(Duration d) {
  const std::int64_t ns = d.count();
  if (ns == 0) {
    return "0s";
  }
  const std::int64_t mag = ns < 0 ? -ns : ns;
  for (const auto& u : kUnits) {
    if (mag % u.ns == 0) {
      return fmt::format("{}{}{}", ns < 0 ? "-" : "", mag / u.ns, u.suffix);
    }
  }
  return fmt::format("{}ns", ns);
}

SlottedAloha derive_slotted(const ScenarioConfig& config, Duration rounding, Duration slot,
                            int max_phase_slots) {
  SlottedAloha s;
  s.plan = plan_slot(config.uplink_profile, config.ack_profile, config.rx1_delay, config.guard,
                     rounding);
  if (slot > Duration{0}) {
    s.plan.t = slot;
  }
  if (max_phase_slots <= 0) {
    max_phase_slots = static_cast<int>(std::max<std::int64_t>(1, config.app_period / s.plan.t));
  }
  s.backoff.max_phase_slots = max_phase_slots;
  return s;
}

ScenarioConfig with_policy(ScenarioConfig config, const MacPolicy& policy) {
  config.policy = policy;
  return config;
}

ScenarioFile parse_scenario(std::istream& in) {
  ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({fmt::format("line {}: {}", e.line(), e.message())});
  }

  Reader r(root);
  auto& errors = r.errors();
  const auto& keys = known_keys();
  for (const auto& [section, body] : root) {
    const auto it = keys.find(section);
    if (it == keys.end()) {
      errors.push_back(body.empty() ? fmt::format("{}: entries must live inside a [section]", section)
                                    : fmt::format("[{}]: unknown section", section));
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        errors.push_back(fmt::format("[{}] {}: unknown key", section, key));
      }
    }
  }

  ScenarioFile out;
  ScenarioConfig& c = out.config;
  r.read("scenario", "nodes", c.n_nodes, parse_small_int);
  r.read("scenario", "period", c.app_period, parse_duration_str);
  r.read("scenario", "jitter", c.jitter, parse_duration_str);
  r.read("scenario", "duration", c.duration, parse_duration_str);
  r.read("scenario", "warmup", c.warmup, parse_duration_str);
  r.read("scenario", "seed", c.rng_seed, [](const std::string& s) {
    return std::optional<std::uint64_t>{parse_u64(s)};
  });
  r.read("scenario", "channels", c.n_channels, parse_small_int);
  r.read("scenario", "channel_selection", c.channel_selection, [](const std::string& s) {
    if (s == "fixed") return ChannelSelection::fixed;
    if (s == "round-robin") return ChannelSelection::round_robin;
    if (s == "uniform-random") return ChannelSelection::uniform_random;
    throw PreconditionError("expected fixed, round-robin or uniform-random, got '" + s + "'");
  });
  r.read("scenario", "confirm", c.confirm, [](const std::string& s) {
    if (s == "always") return ConfirmMode::always;
    if (s == "resync") return ConfirmMode::resync;
    throw PreconditionError("expected always or resync, got '" + s + "'");
  });
  r.read("scenario", "initial_offset", c.max_initial_offset, parse_duration_str);
  r.read("scenario", "drift_ppm_min", c.drift_ppm_low, parse_real);
  r.read("scenario", "drift_ppm_max", c.drift_ppm_high, parse_real);

  read_profile(r, "uplink", c.uplink_profile);
  c.ack_profile = ack_profile_for(c.uplink_profile);
  read_profile(r, "ack", c.ack_profile);

  bool slotted_policy = false;
  r.read("mac", "policy", slotted_policy, [](const std::string& s) {
    if (s == "pure") return false;
    if (s == "slotted") return true;
    throw PreconditionError("expected pure or slotted, got '" + s + "'");
  });
  r.read("mac", "rx1_delay", c.rx1_delay, parse_duration_str);
  r.read("mac", "guard", c.guard, parse_duration_str);
  Duration rounding = std::chrono::milliseconds{100};
  r.read("mac", "rounding", rounding, parse_duration_str);
  Duration slot{0};
  r.read("mac", "slot", slot, [](const std::string& s) {
    return s == "auto" ? Duration{0} : parse_duration(s);
  });
  int max_phase = 0;
  r.read("mac", "max_phase_slots", max_phase, [](const std::string& s) {
    if (s == "auto") {
      return 0;
    }
    const int v = parse_small_int(s);
    if (v < 1) {
      throw PreconditionError("must be auto or >= 1");
    }
    return v;
  });

  r.read("sync", "drift_bound_ppm", c.drift_bound_ppm, parse_real);
  r.read("sync", "residual_mean", c.residual.mean, parse_duration_str);
  r.read("sync", "residual_stddev", c.residual.stddev, parse_duration_str);
  r.read("sync", "residual_max", c.residual.max, parse_duration_str);

  r.read("duty_cycle", "cap", c.duty_cycle_cap, parse_real);
  r.read("duty_cycle", "window", c.duty_cycle_window, parse_duration_str);

  if (errors.empty()) {
    try {
      out.slotted = derive_slotted(c, rounding, slot, max_phase);
    } catch (const PreconditionError& e) {
      errors.push_back(std::string("[mac]: ") + e.what());
    }
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  if (slotted_policy) {
    c.policy = out.slotted;
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open scenario file '" + path.string() + "'");
  }
  return parse_scenario(in);
}

std::string canonical_config(const ScenarioConfig& c) {
  std::string policy = "pure";
  if (const auto* s = std::get_if<SlottedAloha>(&c.policy)) {
    policy = fmt::format("slotted t_r={}ns t_b={}ns t={}ns max_phase_slots={}", s->plan.t_r.count(),
                         s->plan.t_b.count(), s->plan.t.count(), s->backoff.max_phase_slots);
  }
  std::ostringstream out;
  out << "nodes = " << c.n_nodes << '\n'
      << "period_ns = " << c.app_period.count() << '\n'
      << "jitter_ns = " << c.jitter.count() << '\n'
      << "uplink = " << profile_line(c.uplink_profile) << '\n'
      << "ack = " << profile_line(c.ack_profile) << '\n'
      << "policy = " << policy << '\n'
      << "channels = " << c.n_channels << '\n'
      << "channel_selection = " << to_string(c.channel_selection) << '\n'
      << "drift_ppm = " << fmt::format("{} {}", c.drift_ppm_low, c.drift_ppm_high) << '\n'
      << "initial_offset_ns = " << c.max_initial_offset.count() << '\n';
  if (!c.first_ready.empty()) {
    out << "first_ready_ns =";
    for (Duration d : c.first_ready) {
      out << ' ' << d.count();
    }
    out << '\n';
  }
  out << "drift_bound_ppm = " << fmt::format("{}", c.drift_bound_ppm) << '\n'
      << "residual_ns = " << c.residual.mean.count() << ' ' << c.residual.stddev.count() << ' '
      << c.residual.max.count() << '\n'
      << "rx1_delay_ns = " << c.rx1_delay.count() << '\n'
      << "guard_ns = " << c.guard.count() << '\n'
      << "confirm = " << to_string(c.confirm) << '\n'
      << "duty_cycle = " << fmt::format("{} {}", c.duty_cycle_cap, c.duty_cycle_window.count())
      << '\n'
      << "duration_ns = " << c.duration.count() << '\n'
      << "warmup_ns = " << c.warmup.count() << '\n';
  return out.str();
}

std::uint64_t config_hash(const ScenarioConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (char ch : canonical_config(c)) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace saloha
