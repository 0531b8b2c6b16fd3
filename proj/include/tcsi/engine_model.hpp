#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "tcsi/engine_params.hpp"

namespace tcsi {

inline constexpr std::size_t kStateCount = 13;
using StateVector = std::array<double, kStateCount>;

struct EngineState {
  double T_af = 0, p_af = 0;  // air filter volume
  double T_c = 0, p_c = 0;    // compressor outlet volume
  double T_ic = 0, p_ic = 0;  // intercooler volume
  double T_im = 0, p_im = 0;  // intake manifold
  double T_em = 0, p_em = 0;  // exhaust manifold
  double T_t = 0, p_t = 0;    // volume after the turbine
  double omega_t = 0;         // turbo shaft speed, rad/s

  StateVector to_vector() const;
  static EngineState from_vector(const StateVector& v);
  // Pressures at p_amb, temperatures at T_amb, shaft at omega_t_init.
  static EngineState initial(const EngineParams& params, const AmbientConditions& ambient);
};

inline constexpr std::array<std::string_view, kStateCount> kStateNames = {
    "T_af", "p_af", "T_c", "p_c", "T_ic", "p_ic", "T_im", "p_im",
    "T_em", "p_em", "T_t", "p_t", "omega_t"};

struct ActuatorCommand {
  double A_th = 0.0;         // throttle area, m^2
  double u_wg = 0.0;         // wastegate opening fraction
  double omega_e_ref = 0.0;  // rad/s
  double lambda = 1.0;
  double p_amb = 101325.0;
  double T_amb = 293.15;

  void validate() const;
};

inline constexpr std::size_t kActuatorCount = 6;
inline constexpr std::array<std::string_view, kActuatorCount> kActuatorNames = {
    "u_xth", "u_xwg", "u_omega_eREF", "u_lambda", "u_pamb", "u_Tamb"};

inline constexpr std::size_t kFaultCount = 11;

// Additive fault terms, one per catalogued fault. to_array() follows the
// catalogue order used for matrix columns.
struct FaultSignals {
  double f_paf = 0, f_Cvol = 0, f_Waf = 0, f_Wc = 0, f_Wic = 0, f_Wth = 0, f_xth = 0;
  double f_ypic = 0, f_ypim = 0, f_yTic = 0, f_yWaf = 0;

  std::array<double, kFaultCount> to_array() const;
  bool all_zero() const;
};

struct AlgebraicOutputs {
  double W_af = 0, W_c = 0, W_ic = 0, W_th = 0, W_ei = 0, W_f = 0, W_eo = 0;
  double W_wg = 0, W_t = 0, W_turbo = 0, W_exh = 0;
  double T_af_in = 0, T_c_in = 0, T_ic_in = 0, T_im_in = 0, T_t_in = 0, T_wg = 0;
  double T_t_out = 0, T_eo = 0, T_turbo = 0, T_exh = 0;
  double Pi_c = 0, Pi_th = 0, Pi_th_crit = 0, Pi_t = 0, Pi_t_crit = 0;
  double Phi_c = 0, Psi_c = 0, Psi_th = 0, Psi_t = 0, eta_c = 0, eta_t = 0, BSR = 0;
  double Tq_t = 0, Tq_c = 0, Tq_e = 0;
  double omega_e = 0;
  double A_th_eff = 0;
  bool surge_clamped = false;
};

inline constexpr std::size_t kSensorCount = 9;
inline constexpr std::array<std::string_view, kSensorCount> kSensorNames = {
    "y_Tc", "y_pc", "y_Tic", "y_pic", "y_Tim", "y_pim", "y_Waf", "y_Tqe", "y_pem"};

struct SensorReading {
  double y_Tc = 0, y_pc = 0, y_Tic = 0, y_pic = 0, y_Tim = 0, y_pim = 0;
  double y_Waf = 0, y_Tqe = 0, y_pem = 0;

  std::array<double, kSensorCount> to_array() const;
  static SensorReading from_array(const std::array<double, kSensorCount>& a);
};

// Signed flow through a turbulent restriction, positive from p_up to p_down.
// Below p_lin the square root is replaced by its secant so the flow stays
// differentiable at zero pressure difference.
double restriction_flow(double p_up, double p_down, double T_in, double H, double p_lin);

// Critical pressure ratio (2/(k+1))^(k/(k-1)).
double critical_pressure_ratio(double kappa);

// Isentropic nozzle flow function; constant below the critical ratio,
// zero at ratio >= 1.
double nozzle_flow_function(double pressure_ratio, double kappa);

struct CompressorOutputs {
  double W_c = 0, Tq_c = 0, Pi_c = 0, Psi_c = 0, Phi_c = 0, eta_c = 0;
  double T_c_in = 0;  // outlet gas temperature feeding the compressor volume
  bool surge_clamped = false;
};

// f_Wc is added to the flow before the torque and efficiency are evaluated.
CompressorOutputs compressor(const EngineState& state, const EngineParams& params,
                             double f_Wc = 0.0);

// Effective area is A_th + f_xth, floored at zero.
double throttle_flow(double p_ic, double p_im, double T_ic, double A_th, double f_Wth,
                     double f_xth, const EngineParams& params);

struct EngineFlows {
  double W_ei = 0, W_f = 0, W_eo = 0, T_eo = 0, T_t_in = 0;
};

EngineFlows engine_flows(double p_im, double T_im, double p_em, double omega_e, double lambda,
                         double f_Cvol, double T_amb, const EngineParams& params);

struct TurbineOutputs {
  double W_t = 0, W_wg = 0, W_turbo = 0, Tq_t = 0, eta_t = 0, T_t_out = 0, T_turbo = 0;
  double BSR = 0, Pi_t = 0, Psi_t = 0, T_wg = 0;
};

TurbineOutputs turbine_wastegate(const EngineState& state, double u_wg,
                                 const EngineParams& params);

// Tq_e = V_d * BMEP / (2 pi n_r), BMEP affine in p_im, floored at zero.
double torque_model(double p_im, const EngineParams& params);

struct Evaluation {
  StateVector derivative{};
  AlgebraicOutputs alg;
  SensorReading y;
};

// All algebraic relations followed by the 13 balance equations. Throws
// ModelBlowup naming the first non-finite derivative; `t` only labels it.
Evaluation eval_derivatives(const EngineState& state, const ActuatorCommand& cmd,
                            const FaultSignals& faults, const EngineParams& params,
                            double t = 0.0);

AlgebraicOutputs eval_algebraic(const EngineState& state, const ActuatorCommand& cmd,
                                const FaultSignals& faults, const EngineParams& params);

SensorReading sensor_outputs(const EngineState& state, const AlgebraicOutputs& alg,
                             const FaultSignals& faults);

}  // namespace tcsi
