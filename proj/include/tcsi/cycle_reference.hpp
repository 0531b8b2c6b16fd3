#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tcsi/engine_params.hpp"

namespace tcsi {

struct DrivingCycle {
  std::string name;
  std::vector<double> time;       // s, strictly increasing from 0
  std::vector<double> speed_kmh;  // km/h, non-negative

  double duration() const { return time.empty() ? 0.0 : time.back(); }
  // Linear interpolation, held constant outside the sampled range.
  double speed_at(double t) const;
  void validate() const;
};

// Two columns `time_s,speed_kmh`; header optional.
DrivingCycle parse_cycle_csv(std::string_view text, std::string name);
DrivingCycle load_cycle_csv(const std::filesystem::path& path);

// Names of the fixtures under data/cycles.
std::vector<std::string> bundled_cycle_names();
std::filesystem::path cycle_data_dir();
// A bundled name (eudc, nedc, wltp, ftp75, synthetic) or a CSV path.
std::filesystem::path resolve_cycle_path(const std::string& name_or_path);
DrivingCycle load_cycle(const std::string& name_or_path);

inline constexpr int kGearCount = 8;

struct GearboxSpec {
  std::array<double, kGearCount> ratios = {5.250, 3.029, 1.950, 1.457, 1.221, 1.000, 0.809, 0.673};
  double reverse_ratio = 4.015;
  double final_drive = 2.774;
  // Tabulated speed per 1000 rpm and shift points; these drive gear_select.
  std::array<double, kGearCount> table_kmh_per_1000rpm = {8.070, 14.00, 21.70, 29.00,
                                                          34.70, 42.30, 52.34, 62.90};
  std::array<double, kGearCount> shift_rpm = {2800, 2700, 2600, 2400, 2200, 2000, 1800, 1600};
  double downshift_fraction = 0.9;
  double idle_rpm = 800.0;

  double r_w = 0.3234;
  double m_v = 1700.0;
  double c_d = 0.29;
  double c_r = 0.013;
  double A_f = 2.28;
  double rho_a = 1.29;
  double g = 9.81;

  double total_ratio(int gear) const { return final_drive * ratios.at(gear - 1); }
  void validate() const;
};

// km/h per 1000 rpm from the wheel radius and ratios (gear is 1-based).
double speed_per_1000rpm(int gear, const GearboxSpec& spec);
double implied_engine_rpm(double v_kmh, int gear, const GearboxSpec& spec);

// previous_gear = 0 means no history (pure upshift map).
int gear_select(double v_kmh, const GearboxSpec& spec, int previous_gear = 0);

double engine_speed_reference(double v_ms, int gear, const GearboxSpec& spec);

struct RoadLoad {
  double F_inertia = 0, F_drag = 0, F_roll = 0;
  double F_wheel() const { return F_inertia + F_drag + F_roll; }
};

RoadLoad road_load(double v_ms, double accel, const GearboxSpec& spec);
// Unclamped; negative while braking.
double engine_torque_reference(double v_ms, double accel, int gear, const GearboxSpec& spec);

struct PressureReferences {
  double bmep = 0, p_im = 0, p_ic = 0;
};

PressureReferences pressure_references(double Tq_ref, const EngineParams& params);

struct ReferencePoint {
  double t = 0;
  double omega_e_ref = 0;
  double Tq_e_ref = 0;
  int gear = 1;
  double bmep = 0, p_im_ref = 0, p_ic_ref = 0;
};

// Evaluates references along a cycle at non-decreasing times. Carries the
// gear between calls for hysteresis. t < 0 yields the idle point.
class ReferenceGenerator {
 public:
  ReferenceGenerator(const DrivingCycle& cycle, const GearboxSpec& spec, const EngineParams& params);

  ReferencePoint at(double t);
  double acceleration_at(double t) const;

 private:
  DrivingCycle cycle_;
  GearboxSpec spec_;
  EngineParams params_;
  std::vector<double> accel_;
  int gear_ = 1;
};

// References at the cycle's own sample times.
std::vector<ReferencePoint> build_reference_trajectory(const DrivingCycle& cycle,
                                                       const GearboxSpec& spec,
                                                       const EngineParams& params);

}  // namespace tcsi
