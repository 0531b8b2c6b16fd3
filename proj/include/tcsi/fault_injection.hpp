#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsi/engine_model.hpp"

namespace tcsi {

// Catalogue order; also the column order of sensitivity matrices.
enum class FaultId { f_paf, f_Cvol, f_Waf, f_Wc, f_Wic, f_Wth, f_xth, f_ypic, f_ypim, f_yTic, f_yWaf };

inline constexpr std::array<FaultId, kFaultCount> kAllFaults = {
    FaultId::f_paf, FaultId::f_Cvol, FaultId::f_Waf,  FaultId::f_Wc,   FaultId::f_Wic,  FaultId::f_Wth,
    FaultId::f_xth, FaultId::f_ypic, FaultId::f_ypim, FaultId::f_yTic, FaultId::f_yWaf};

inline constexpr std::array<std::string_view, kFaultCount> kFaultNames = {
    "f_paf", "f_Cvol", "f_Waf", "f_Wc", "f_Wic", "f_Wth", "f_xth", "f_ypic", "f_ypim", "f_yTic", "f_yWaf"};

std::string_view fault_name(FaultId id);
std::size_t fault_index(FaultId id);
// Accepts the catalogue names; throws ConfigError otherwise.
FaultId parse_fault_id(std::string_view name);
// "none" -> nullopt.
std::optional<FaultId> parse_fault_selection(std::string_view name);
bool is_sensor_fault(FaultId id);

enum class FaultShape { abrupt, incipient, pulsed };

struct TimePoint {
  double value = 0.0;
  bool fraction_of_cycle = false;  // value * T_DC when set
  double resolve(double T_DC) const { return fraction_of_cycle ? value * T_DC : value; }
};

struct FaultProfile {
  FaultId id = FaultId::f_paf;
  FaultShape shape = FaultShape::abrupt;
  // Pa for f_paf, K for f_yTic, otherwise a fraction of the local signal.
  double magnitude = 0.0;
  TimePoint start;
  TimePoint end{1.0, true};
  double period = 0.0;   // pulsed only; first pulse starts at t = period
  double on_time = 0.0;  // pulsed only

  void validate(double T_DC) const;
};

FaultProfile catalog_profile(FaultId id);

using Window = std::pair<double, double>;

struct FaultSchedule {
  std::optional<FaultProfile> profile;
  double T_DC = 0.0;

  static FaultSchedule none(double T_DC);
  static FaultSchedule single(FaultId id, double T_DC);
  void validate() const;
  // Closed intervals in [0, T_DC] where activation is nonzero.
  std::vector<Window> active_windows() const;
};

// 0 outside the window, 1 inside for abrupt, linear ramp for incipient,
// square wave for pulsed.
double activation(double t, const FaultProfile& profile, double T_DC);

// Orifice leak flow; k_leak_mm2 is the orifice area in mm^2.
double leakage_psi(double pressure_ratio, double kappa);
double leakage_flow(double p_high, double p_low, double T_amb, double k_leak_mm2, double kappa);
// Bisection for the orifice area giving `target_flow` at the given pressures.
double calibrate_leak_area(double p_high, double p_low, double T_amb, double kappa,
                           double target_flow, double tol = 1e-12);

// Fault-free quantities at the current operating point.
struct FaultContext {
  double W_af = 0, W_c = 0, W_ic = 0, W_th = 0, W_ei = 0;
  double A_th = 0;
  double p_amb = 0, T_amb = 0, p_af = 0, T_af = 0;
  double p_im = 0, p_ic = 0;
};

FaultContext make_fault_context(const EngineState& state, const ActuatorCommand& cmd,
                                const AlgebraicOutputs& fault_free);

FaultSignals realize(double t, const FaultSchedule& schedule, const FaultContext& ctx,
                     const EngineParams& params);

}  // namespace tcsi
