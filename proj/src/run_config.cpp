#include "tcsi/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>

#include "tcsi/keyvalue.hpp"

extern char** environ;

namespace tcsi {

namespace {

struct GainField {
  const char* name;
  double ControllerGains::*member;
};

constexpr GainField kGainFields[] = {
    {"Kp_th", &ControllerGains::Kp_th},         {"Ti_th", &ControllerGains::Ti_th},
    {"Kp_wg", &ControllerGains::Kp_wg},         {"Ti_wg", &ControllerGains::Ti_wg},
    {"Kaw_th", &ControllerGains::Kaw_th},       {"Kaw_wg", &ControllerGains::Kaw_wg},
    {"alpha_min", &ControllerGains::alpha_min}, {"alpha_max", &ControllerGains::alpha_max},
    {"u_wg_min", &ControllerGains::u_wg_min},   {"u_wg_max", &ControllerGains::u_wg_max},
    {"a0", &ControllerGains::a0},               {"a1", &ControllerGains::a1},
    {"a2", &ControllerGains::a2}};

constexpr const char* kTopKeys[] = {
    "cycle", "fault", "dt", "seed", "log_decimation", "warmup", "noise", "noise_std_fraction",
    "threshold", "tf", "filter_tau", "out", "run_dir", "threads", "save_runs", "calibration",
    "engine_params"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

int positive_int(std::string_view value, std::string_view key) {
  const long long v = parse_integer(value, key);
  if (v < 1 || v > 1'000'000) throw ConfigError(std::string(key) + " must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

void RunConfig::validate() const {
  sim.validate();
  diagnosis.validate();
  try {
    params.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("engine parameters: ") + e.what());
  }
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k(key);
  const std::string v = trim(value);
  if (k == "cycle") {
    if (v.empty()) throw ConfigError("cycle must not be empty");
    cfg.sim.cycle = v;
  } else if (k == "fault") {
    cfg.sim.fault = parse_fault_selection(v);
  } else if (k == "dt") {
    cfg.sim.dt = parse_double(v, k);
  } else if (k == "seed") {
    const long long s = parse_integer(v, k);
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.sim.seed = static_cast<std::uint64_t>(s);
  } else if (k == "log_decimation") {
    cfg.sim.log_decimation = positive_int(v, k);
  } else if (k == "warmup") {
    cfg.sim.warmup = parse_double(v, k);
  } else if (k == "noise") {
    cfg.sim.noise.enabled = parse_bool(v, k);
  } else if (k == "noise_std_fraction") {
    cfg.sim.noise.std_fraction = parse_double(v, k);
  } else if (starts_with(k, "noise_full_scale.")) {
    const std::string sensor = k.substr(17);
    auto it = std::find(kSensorNames.begin(), kSensorNames.end(), sensor);
    if (it == kSensorNames.end()) throw ConfigError("unknown sensor '" + sensor + "'");
    cfg.sim.noise.full_scale[static_cast<std::size_t>(it - kSensorNames.begin())] = parse_double(v, k);
  } else if (k == "threshold") {
    cfg.diagnosis.J = parse_double(v, k);
  } else if (k == "tf") {
    cfg.diagnosis.t_f = parse_double(v, k);
  } else if (k == "filter_tau") {
    cfg.diagnosis.filter_tau = parse_double(v, k);
  } else if (k == "out") {
    cfg.out_dir = v;
  } else if (k == "run_dir") {
    if (v.empty()) cfg.run_dir.reset();
    else cfg.run_dir = v;
  } else if (k == "threads") {
    const long long n = parse_integer(v, k);
    if (n < 0 || n > 4096) throw ConfigError("threads must be in [0, 4096]");
    cfg.threads = static_cast<unsigned>(n);
  } else if (k == "save_runs") {
    cfg.save_runs = parse_bool(v, k);
  } else if (k == "calibration") {
    if (v.empty()) cfg.calibration_file.reset();
    else cfg.calibration_file = v;
  } else if (k == "engine_params") {
    cfg.engine_params_file = v;
    cfg.params = load_engine_params(v);
  } else if (k == "ambient.p_amb") {
    cfg.sim.ambient.p_amb = parse_double(v, k);
  } else if (k == "ambient.T_amb") {
    cfg.sim.ambient.T_amb = parse_double(v, k);
  } else if (k == "gearbox.downshift_fraction") {
    cfg.sim.gearbox.downshift_fraction = parse_double(v, k);
  } else if (k == "gearbox.idle_rpm") {
    cfg.sim.gearbox.idle_rpm = parse_double(v, k);
  } else if (starts_with(k, "gains.")) {
    const std::string field = k.substr(6);
    for (const auto& g : kGainFields) {
      if (field == g.name) {
        cfg.sim.gains.*g.member = parse_double(v, k);
        return;
      }
    }
    throw ConfigError("unknown controller gain '" + field + "'");
  } else if (starts_with(k, "engine.")) {
    set_engine_param(cfg.params, k.substr(7), parse_double(v, k));
  } else {
    throw ConfigError("unknown setting '" + k + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin) {
  for (const auto& kv : parse_key_values(text, origin)) {
    try {
      apply_setting(cfg, kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  apply_config_text(cfg, read_text_file(path), path.string());
}

void apply_environment(RunConfig& cfg,
                       const std::vector<std::pair<std::string, std::string>>& env) {
  std::vector<std::pair<std::string, std::string>> sorted = env;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [name, value] : sorted) {
    if (!starts_with(name, "TCSI_") || name == "TCSI_DATA_DIR") continue;
    std::string key = name.substr(5);
    for (std::size_t p; (p = key.find("__")) != std::string::npos;) key.replace(p, 2, ".");
    const std::string low = lower(key);
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      key = low;
    } else {
      key = lower(key.substr(0, dot)) + key.substr(dot);
    }
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("environment " + name + ": " + e.what());
    }
  }
}

std::vector<std::pair<std::string, std::string>> process_environment() {
  std::vector<std::pair<std::string, std::string>> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view s(*e);
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace_back(std::string(s.substr(0, eq)), std::string(s.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys(std::begin(kTopKeys), std::end(kTopKeys));
  for (auto s : kSensorNames) keys.push_back("noise_full_scale." + std::string(s));
  keys.insert(keys.end(), {"ambient.p_amb", "ambient.T_amb", "gearbox.downshift_fraction",
                           "gearbox.idle_rpm"});
  for (const auto& g : kGainFields) keys.push_back(std::string("gains.") + g.name);
  for (const auto& n : engine_param_names()) keys.push_back("engine." + n);
  return keys;
}

std::string format_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto put = [&](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  put("cycle", cfg.sim.cycle);
  put("fault", cfg.sim.fault ? std::string(fault_name(*cfg.sim.fault)) : "none");
  put("dt", format_double(cfg.sim.dt));
  put("seed", std::to_string(cfg.sim.seed));
  put("log_decimation", std::to_string(cfg.sim.log_decimation));
  put("warmup", format_double(cfg.sim.warmup));
  put("noise", cfg.sim.noise.enabled ? "true" : "false");
  put("noise_std_fraction", format_double(cfg.sim.noise.std_fraction));
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    put("noise_full_scale." + std::string(kSensorNames[i]), format_double(cfg.sim.noise.full_scale[i]));
  }
  put("threshold", format_double(cfg.diagnosis.J));
  put("tf", format_double(cfg.diagnosis.t_f));
  put("filter_tau", format_double(cfg.diagnosis.filter_tau));
  put("threads", std::to_string(cfg.threads));
  put("save_runs", cfg.save_runs ? "true" : "false");
  if (cfg.calibration_file) put("calibration", cfg.calibration_file->string());
  put("ambient.p_amb", format_double(cfg.sim.ambient.p_amb));
  put("ambient.T_amb", format_double(cfg.sim.ambient.T_amb));
  put("gearbox.downshift_fraction", format_double(cfg.sim.gearbox.downshift_fraction));
  put("gearbox.idle_rpm", format_double(cfg.sim.gearbox.idle_rpm));
  for (const auto& g : kGainFields) put(std::string("gains.") + g.name, format_double(cfg.sim.gains.*g.member));
  for (const auto& n : engine_param_names()) put("engine." + n, format_double(get_engine_param(cfg.params, n)));
  return out.str();
}

}  // namespace tcsi
