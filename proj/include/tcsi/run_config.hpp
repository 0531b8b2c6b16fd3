#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsi/campaign.hpp"

namespace tcsi {

// Merged settings for one CLI invocation. Precedence, lowest first:
// defaults, --config file, TCSI_* environment, command-line flags.
struct RunConfig {
  SimConfig sim;
  DiagnosisConfig diagnosis;
  EngineParams params;
  std::filesystem::path out_dir = "Results";
  std::optional<std::filesystem::path> run_dir;  // exact output directory
  std::optional<std::filesystem::path> engine_params_file;
  std::optional<std::filesystem::path> calibration_file;
  unsigned threads = 0;
  bool save_runs = false;  // campaign: keep per-run CSV logs

  void validate() const;
};

// Keys: cycle, fault, dt, seed, log_decimation, warmup, noise,
// noise_std_fraction, noise_full_scale.<sensor>, threshold, tf, filter_tau,
// out, run_dir, threads, save_runs, calibration, engine_params,
// ambient.p_amb, ambient.T_amb, gains.<field>, gearbox.downshift_fraction,
// gearbox.idle_rpm, engine.<param>. Throws ConfigError.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Variables named TCSI_<key> with '.' spelled "__". Top-level keys match
// case-insensitively; engine./gains. suffixes are case-sensitive.
void apply_environment(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& env);
std::vector<std::pair<std::string, std::string>> process_environment();

std::vector<std::string> setting_keys();
// Round-trips through apply_config_text. Engine parameters are listed in full.
std::string format_run_config(const RunConfig& cfg);

}  // namespace tcsi
