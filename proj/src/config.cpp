#include "estim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace estim {

const char* mode_name(ExperimentConfig::Mode mode) {
  switch (mode) {
    case ExperimentConfig::Mode::Electroadhesion: return "electroadhesion";
    case ExperimentConfig::Mode::Electrotactile: return "electrotactile";
    case ExperimentConfig::Mode::Baseline: return "baseline";
  }
  return "unknown";
}

namespace {

double parse_double_value(const std::string& v) {
  double out;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out))
    fail(ErrorCode::BadConfig, "'" + v + "' is not a number");
  return out;
}

long long parse_int_value(const std::string& v) {
  long long out;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) fail(ErrorCode::BadConfig, "'" + v + "' is not an integer");
  return out;
}

std::uint32_t parse_u32_value(const std::string& v) {
  const long long out = parse_int_value(v);
  if (out < 0 || out > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::BadConfig, "'" + v + "' out of u32 range");
  return static_cast<std::uint32_t>(out);
}

std::uint64_t parse_u64_value(const std::string& v) {
  std::uint64_t out;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    fail(ErrorCode::BadConfig, "'" + v + "' is not an unsigned integer");
  return out;
}

bool parse_bool_value(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorCode::BadConfig, "'" + v + "' is not a boolean (true/false)");
}

int parse_index_value(const std::string& v) {
  const long long out = parse_int_value(v);
  if (out < 0 || out > std::numeric_limits<int>::max())
    fail(ErrorCode::BadConfig, "'" + v + "' out of index range");
  return static_cast<int>(out);
}

/// Millisecond keys convert to the us tick grid; fractional microseconds are
/// rejected rather than rounded.
std::uint32_t ms_to_us(const std::string& v) {
  const double ms = parse_double_value(v);
  const double us = ms * 1000.0;
  const long long rounded = std::llround(us);
  if (us < 0.0 || std::abs(us - static_cast<double>(rounded)) > 1e-3 ||
      rounded > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::BadConfig, "'" + v + "' ms is not a whole non-negative microsecond count");
  return static_cast<std::uint32_t>(rounded);
}

struct KeyEntry {
  const char* key;  // "section.key"
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      {"experiment.mode",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "electroadhesion")
           c.mode = ExperimentConfig::Mode::Electroadhesion;
         else if (v == "electrotactile")
           c.mode = ExperimentConfig::Mode::Electrotactile;
         else if (v == "baseline")
           c.mode = ExperimentConfig::Mode::Baseline;
         else
           fail(ErrorCode::BadConfig, "'" + v + "' is not a mode");
       }},
      {"experiment.dt_s", [](ExperimentConfig& c, const std::string& v) { c.dt_s = parse_double_value(v); }},
      {"experiment.duration_s",
       [](ExperimentConfig& c, const std::string& v) { c.duration_s = parse_double_value(v); }},
      {"experiment.noise_sigma_g",
       [](ExperimentConfig& c, const std::string& v) { c.noise_sigma_G = parse_double_value(v); }},
      {"experiment.seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64_value(v); }},
      {"experiment.out_dir", [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; }},

      {"array.rows", [](ExperimentConfig& c, const std::string& v) { c.geometry.rows = parse_index_value(v); }},
      {"array.cols", [](ExperimentConfig& c, const std::string& v) { c.geometry.cols = parse_index_value(v); }},
      {"array.electrode_diameter_mm",
       [](ExperimentConfig& c, const std::string& v) { c.geometry.electrode_diameter_mm = parse_double_value(v); }},
      {"array.pitch_mm",
       [](ExperimentConfig& c, const std::string& v) { c.geometry.pitch_mm = parse_double_value(v); }},
      {"array.origin_x_mm",
       [](ExperimentConfig& c, const std::string& v) { c.geometry.origin_mm.x = parse_double_value(v); }},
      {"array.origin_y_mm",
       [](ExperimentConfig& c, const std::string& v) { c.geometry.origin_mm.y = parse_double_value(v); }},

      {"electroadhesion.pulse_width_us",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.pulse_width_us = parse_u32_value(v); }},
      {"electroadhesion.burst_ms",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.burst_us = ms_to_us(v); }},
      {"electroadhesion.pause_ms",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.pause_us = ms_to_us(v); }},
      {"electroadhesion.current_ma",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.current_mA = parse_double_value(v); }},
      {"electroadhesion.pattern",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "row_alternate")
           c.electroadhesion.pattern = PartitionPattern::row_alternate();
         else if (v == "checkerboard")
           c.electroadhesion.pattern = PartitionPattern::checkerboard();
         else
           fail(ErrorCode::BadConfig,
                "'" + v + "' is not a pattern (row_alternate/checkerboard; custom is API-only)");
       }},
      {"electroadhesion.periods",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.periods = parse_u32_value(v); }},
      {"electroadhesion.dead_time_us",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.dead_time_us = parse_u32_value(v); }},
      {"electroadhesion.pause_floating",
       [](ExperimentConfig& c, const std::string& v) { c.electroadhesion.pause_floating = parse_bool_value(v); }},

      {"electrotactile.target_row",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.target.row = parse_index_value(v); }},
      {"electrotactile.target_col",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.target.col = parse_index_value(v); }},
      {"electrotactile.polarity",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "anodic")
           c.electrotactile.polarity = Polarity::Anodic;
         else if (v == "cathodic")
           c.electrotactile.polarity = Polarity::Cathodic;
         else
           fail(ErrorCode::BadConfig, "'" + v + "' is not a polarity (anodic/cathodic)");
       }},
      {"electrotactile.pulse_width_us",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.pulse_width_us = parse_u32_value(v); }},
      {"electrotactile.current_ma",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.current_mA = parse_double_value(v); }},
      {"electrotactile.repetition_hz",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.repetition_frequency_hz = parse_double_value(v); }},
      {"electrotactile.pulses",
       [](ExperimentConfig& c, const std::string& v) { c.electrotactile.pulses = parse_u32_value(v); }},

      {"skin.r_sc_ohm", [](ExperimentConfig& c, const std::string& v) { c.skin.r_sc_ohm = parse_double_value(v); }},
      {"skin.c_sc_f", [](ExperimentConfig& c, const std::string& v) { c.skin.c_sc_F = parse_double_value(v); }},
      {"skin.r_body_ohm",
       [](ExperimentConfig& c, const std::string& v) { c.skin.r_body_ohm = parse_double_value(v); }},
      {"skin.gap_m", [](ExperimentConfig& c, const std::string& v) { c.skin.gap_m = parse_double_value(v); }},
      {"skin.epsilon_r_gap",
       [](ExperimentConfig& c, const std::string& v) { c.skin.epsilon_r_gap = parse_double_value(v); }},

      {"mech.mass_kg", [](ExperimentConfig& c, const std::string& v) { c.mech.mass_kg = parse_double_value(v); }},
      {"mech.stiffness_n_per_m",
       [](ExperimentConfig& c, const std::string& v) { c.mech.stiffness_N_per_m = parse_double_value(v); }},
      {"mech.damping_ns_per_m",
       [](ExperimentConfig& c, const std::string& v) { c.mech.damping_Ns_per_m = parse_double_value(v); }},

      {"trajectory.center_x_mm",
       [](ExperimentConfig& c, const std::string& v) {
         c.trajectory.center_mm.x = parse_double_value(v);
         c.trajectory_center_set = true;
       }},
      {"trajectory.center_y_mm",
       [](ExperimentConfig& c, const std::string& v) {
         c.trajectory.center_mm.y = parse_double_value(v);
         c.trajectory_center_set = true;
       }},
      {"trajectory.radius_mm",
       [](ExperimentConfig& c, const std::string& v) { c.trajectory.radius_mm = parse_double_value(v); }},
      {"trajectory.rev_per_s",
       [](ExperimentConfig& c, const std::string& v) { c.trajectory.rev_per_s = parse_double_value(v); }},
      {"trajectory.contact_radius_mm",
       [](ExperimentConfig& c, const std::string& v) { c.trajectory.contact_radius_mm = parse_double_value(v); }},
      {"trajectory.phase0_rad",
       [](ExperimentConfig& c, const std::string& v) { c.trajectory.phase0_rad = parse_double_value(v); }},

      {"safety.max_current_ma",
       [](ExperimentConfig& c, const std::string& v) { c.safety.max_current_mA = parse_double_value(v); }},
      {"safety.max_pulse_width_us",
       [](ExperimentConfig& c, const std::string& v) { c.safety.max_pulse_width_us = parse_u32_value(v); }},
      {"safety.max_net_charge_uc",
       [](ExperimentConfig& c, const std::string& v) { c.safety.max_net_charge_uC = parse_double_value(v); }},
      {"safety.max_compliance_v",
       [](ExperimentConfig& c, const std::string& v) { c.safety.max_compliance_V = parse_double_value(v); }},
  };
  return table;
}

const KeyEntry* find_key(const std::string& dotted) {
  for (const KeyEntry& e : key_table())
    if (dotted == e.key) return &e;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() { return ExperimentConfig{}; }

std::vector<std::string> ExperimentConfig::known_keys() {
  std::vector<std::string> keys;
  for (const KeyEntry& e : key_table()) keys.emplace_back(e.key);
  return keys;
}

void ExperimentConfig::apply_override(const std::string& dotted_key, const std::string& value) {
  const KeyEntry* entry = find_key(dotted_key);
  if (!entry) fail(ErrorCode::BadConfig, "unknown config key '" + dotted_key + "'");
  try {
    entry->set(*this, value);
  } catch (const Error& e) {
    throw Error(e.code(), dotted_key + ": " + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        fail(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": malformed section header");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      fail(ErrorCode::BadConfig, "line " + std::to_string(line_no) + ": key outside any section");
    const std::string dotted = section + "." + key;
    const KeyEntry* entry = find_key(dotted);
    if (!entry)
      fail(ErrorCode::BadConfig,
           "line " + std::to_string(line_no) + ": unknown key '" + dotted + "'");
    if (!seen.insert(dotted).second)
      fail(ErrorCode::BadConfig,
           "line " + std::to_string(line_no) + ": duplicate key '" + dotted + "'");
    try {
      entry->set(cfg, value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + dotted + ": " + e.what());
    }
  }

  if (!cfg.trajectory_center_set) cfg.trajectory.center_mm = cfg.geometry.center_mm();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

void ExperimentConfig::validate() const {
  geometry.validate();
  skin.validate();
  mech.validate();
  trajectory.validate();
  if (!(dt_s > 0.0)) fail(ErrorCode::BadConfig, "experiment.dt_s must be > 0");
  if (!(duration_s > 0.0)) fail(ErrorCode::BadConfig, "experiment.duration_s must be > 0");
  if (noise_sigma_G < 0.0) fail(ErrorCode::BadConfig, "experiment.noise_sigma_g must be >= 0");
  if (out_dir.empty()) fail(ErrorCode::BadConfig, "experiment.out_dir must not be empty");
}

std::string default_config_text() {
  return R"(# estim experiment configuration (defaults shown)

[experiment]
mode = electroadhesion
dt_s = 5e-6
duration_s = 1.0
noise_sigma_g = 5.8e-4
seed = 1
out_dir = out

[array]
rows = 8
cols = 8
electrode_diameter_mm = 2.0
pitch_mm = 3.0
origin_x_mm = 0.0
origin_y_mm = 0.0

[electroadhesion]
pulse_width_us = 50
burst_ms = 4.0
pause_ms = 4.0
current_ma = 10.0
pattern = row_alternate
periods = 1
dead_time_us = 0
pause_floating = false

[electrotactile]
target_row = 3
target_col = 3
polarity = anodic
pulse_width_us = 200
current_ma = 1.0
repetition_hz = 50.0
pulses = 50

[skin]
r_sc_ohm = 15000.0
c_sc_f = 20e-9
r_body_ohm = 1000.0
gap_m = 5e-6
epsilon_r_gap = 1.0

[mech]
mass_kg = 0.005
stiffness_n_per_m = 2000.0
damping_ns_per_m = 1.0

[trajectory]
# center defaults to the array center when omitted
radius_mm = 5.0
rev_per_s = 2.0
contact_radius_mm = 5.0
phase0_rad = 0.0

[safety]
max_current_ma = 10.0
max_pulse_width_us = 50
max_net_charge_uc = 0.0
max_compliance_v = 300.0
)";
}

}  // namespace estim
