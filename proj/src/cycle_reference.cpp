#include "tcsi/cycle_reference.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdlib>
#include <numbers>

#include "tcsi/error.hpp"
#include "tcsi/keyvalue.hpp"

#ifndef TCSI_DATA_DIR
#define TCSI_DATA_DIR "data"
#endif

namespace tcsi {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRpmToRadS = 2.0 * kPi / 60.0;

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double t) {
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

}  // namespace

double DrivingCycle::speed_at(double t) const { return interpolate(time, speed_kmh, t); }

void DrivingCycle::validate() const {
  if (time.size() < 2 || time.size() != speed_kmh.size()) {
    throw ConfigError("cycle '" + name + "' needs at least two samples");
  }
  if (time.front() != 0.0) throw ConfigError("cycle '" + name + "' must start at t = 0");
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (!std::isfinite(time[i]) || !std::isfinite(speed_kmh[i]) || speed_kmh[i] < 0.0) {
      throw ConfigError("cycle '" + name + "' has an invalid sample at row " + std::to_string(i));
    }
    if (i > 0 && !(time[i] > time[i - 1])) {
      throw ConfigError("cycle '" + name + "' time is not strictly increasing at row " +
                        std::to_string(i));
    }
  }
}

DrivingCycle parse_cycle_csv(std::string_view text, std::string name) {
  DrivingCycle cycle;
  cycle.name = std::move(name);
  std::size_t pos = 0;
  int line_no = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw ConfigError(cycle.name + ":" + std::to_string(line_no) + ": expected two columns");
    }
    double t = 0.0, v = 0.0;
    try {
      t = parse_double(fields[0], "time_s");
      v = parse_double(fields[1], "speed_kmh");
    } catch (const ConfigError&) {
      if (cycle.time.empty() && line_no == 1) continue;  // header row
      throw;
    }
    cycle.time.push_back(t);
    cycle.speed_kmh.push_back(v);
  }
  cycle.validate();
  return cycle;
}

DrivingCycle load_cycle_csv(const std::filesystem::path& path) {
  return parse_cycle_csv(read_text_file(path), path.stem().string());
}

std::vector<std::string> bundled_cycle_names() {
  return {"eudc", "nedc", "wltp", "ftp75", "synthetic"};
}

std::filesystem::path cycle_data_dir() {
  if (const char* env = std::getenv("TCSI_DATA_DIR"); env && *env) {
    return std::filesystem::path(env) / "cycles";
  }
  return std::filesystem::path(TCSI_DATA_DIR) / "cycles";
}

std::filesystem::path resolve_cycle_path(const std::string& name_or_path) {
  std::string lower = name_or_path;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ftp-75") lower = "ftp75";
  for (const auto& name : bundled_cycle_names()) {
    if (lower == name) return cycle_data_dir() / (name + ".csv");
  }
  std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path)) {
    throw ConfigError("unknown driving cycle '" + name_or_path +
                      "' (expected eudc, nedc, wltp, ftp75, synthetic or a CSV path)");
  }
  return path;
}

DrivingCycle load_cycle(const std::string& name_or_path) {
  return load_cycle_csv(resolve_cycle_path(name_or_path));
}

void GearboxSpec::validate() const {
  for (int g = 0; g < kGearCount; ++g) {
    if (!(ratios[g] > 0.0) || !(shift_rpm[g] > 0.0) || !(table_kmh_per_1000rpm[g] > 0.0)) {
      throw ConfigError("gear ratios, shift speeds and speed-per-1000rpm must be positive");
    }
    if (g > 0 && !(ratios[g] < ratios[g - 1])) {
      throw ConfigError("gear ratios must decrease strictly from 1st to 8th");
    }
  }
  if (!(final_drive > 0.0 && r_w > 0.0 && m_v > 0.0 && rho_a > 0.0 && g > 0.0)) {
    throw ConfigError("vehicle constants must be positive");
  }
  if (!(downshift_fraction > 0.0 && downshift_fraction <= 1.0)) {
    throw ConfigError("downshift_fraction must lie in (0, 1]");
  }
}

double speed_per_1000rpm(int gear, const GearboxSpec& spec) {
  return 120.0 * kPi * spec.r_w / spec.total_ratio(gear);
}

double implied_engine_rpm(double v_kmh, int gear, const GearboxSpec& spec) {
  return 1000.0 * v_kmh / spec.table_kmh_per_1000rpm.at(gear - 1);
}

int gear_select(double v_kmh, const GearboxSpec& spec, int previous_gear) {
  if (v_kmh <= 0.0) return 1;
  int target = kGearCount;
  for (int g = 1; g <= kGearCount; ++g) {
    if (implied_engine_rpm(v_kmh, g, spec) <= spec.shift_rpm[g - 1]) {
      target = g;
      break;
    }
  }
  if (previous_gear < 1 || target >= previous_gear) return target;
  // Downshift only once a lower gear would run below the hysteresis band.
  for (int g = 1; g < previous_gear; ++g) {
    if (implied_engine_rpm(v_kmh, g, spec) <= spec.downshift_fraction * spec.shift_rpm[g - 1]) {
      return g;
    }
  }
  return previous_gear;
}

double engine_speed_reference(double v_ms, int gear, const GearboxSpec& spec) {
  return v_ms * spec.total_ratio(gear) / spec.r_w;
}

RoadLoad road_load(double v_ms, double accel, const GearboxSpec& spec) {
  RoadLoad f;
  f.F_inertia = spec.m_v * accel;
  f.F_drag = 0.5 * spec.rho_a * spec.c_d * spec.A_f * v_ms * v_ms;
  f.F_roll = v_ms > 0.0 ? spec.m_v * spec.c_r * spec.g : 0.0;
  return f;
}

double engine_torque_reference(double v_ms, double accel, int gear, const GearboxSpec& spec) {
  return road_load(v_ms, accel, spec).F_wheel() * spec.r_w / spec.total_ratio(gear);
}

PressureReferences pressure_references(double Tq_ref, const EngineParams& params) {
  PressureReferences p;
  p.bmep = 2.0 * kPi * params.n_r * Tq_ref / params.V_d;
  p.p_im = (p.bmep + params.bmep_offset()) / params.bmep_slope();
  p.p_ic = p.p_im + params.dp_th_ref;
  return p;
}

ReferenceGenerator::ReferenceGenerator(const DrivingCycle& cycle, const GearboxSpec& spec,
                                       const EngineParams& params)
    : cycle_(cycle), spec_(spec), params_(params) {
  cycle_.validate();
  spec_.validate();
  const auto& t = cycle_.time;
  const std::size_t n = t.size();
  accel_.resize(n);
  auto v = [&](std::size_t i) { return cycle_.speed_kmh[i] / 3.6; };
  accel_[0] = (v(1) - v(0)) / (t[1] - t[0]);
  accel_[n - 1] = (v(n - 1) - v(n - 2)) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    accel_[i] = (v(i + 1) - v(i - 1)) / (t[i + 1] - t[i - 1]);
  }
}

double ReferenceGenerator::acceleration_at(double t) const {
  return interpolate(cycle_.time, accel_, t);
}

ReferencePoint ReferenceGenerator::at(double t) {
  ReferencePoint r;
  r.t = t;
  const double idle = spec_.idle_rpm * kRpmToRadS;
  if (t < 0.0) {
    gear_ = 1;
    r.gear = 1;
    r.omega_e_ref = idle;
  } else {
    const double v_kmh = cycle_.speed_at(t);
    const double v = v_kmh / 3.6;
    gear_ = gear_select(v_kmh, spec_, gear_);
    r.gear = gear_;
    r.omega_e_ref = std::max(engine_speed_reference(v, gear_, spec_), idle);
    r.Tq_e_ref = std::max(engine_torque_reference(v, acceleration_at(t), gear_, spec_), 0.0);
  }
  const PressureReferences p = pressure_references(r.Tq_e_ref, params_);
  r.bmep = p.bmep;
  r.p_im_ref = p.p_im;
  r.p_ic_ref = p.p_ic;
  return r;
}

std::vector<ReferencePoint> build_reference_trajectory(const DrivingCycle& cycle,
                                                       const GearboxSpec& spec,
                                                       const EngineParams& params) {
  ReferenceGenerator gen(cycle, spec, params);
  std::vector<ReferencePoint> out;
  out.reserve(cycle.time.size());
  for (double t : cycle.time) out.push_back(gen.at(t));
  return out;
}

}  // namespace tcsi
