#pragma once

#include "tcsi/engine_params.hpp"

namespace tcsi {

struct ControllerGains {
  double Kp_th = 1e-5;  // 1/Pa
  double Ti_th = 0.1;   // s
  double Kp_wg = 1e-5;  // 1/Pa
  double Ti_wg = 1.0;   // s
  // Back-calculation gains on (saturated - raw); 0 selects 1/Kp.
  double Kaw_th = 0.0;
  double Kaw_wg = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 1.0;
  double u_wg_min = 0.0;
  double u_wg_max = 1.0;
  double a0 = 1.1647e-5;
  double a1 = 3.0718e-5;
  double a2 = 0.0029;

  void validate() const;
  double back_calculation_th() const { return Kaw_th > 0.0 ? Kaw_th : 1.0 / Kp_th; }
  double back_calculation_wg() const { return Kaw_wg > 0.0 ? Kaw_wg : 1.0 / Kp_wg; }
};

struct PiState {
  double integrator = 0.0;
};

struct PiOutput {
  double raw = 0.0;        // feedforward + feedback before saturation
  double saturated = 0.0;
  double feedback = 0.0;
  bool saturated_flag = false;
};

// One forward-Euler step of a PI loop with back-calculation anti-windup:
// u = ff + Kp*e + Kp/Ti*I, I += (e + Kaw*(sat(u) - u))*dt.
PiOutput pi_antiwindup_step(double error, double feedforward, double Kp, double Ti, double Kaw,
                            double u_min, double u_max, PiState& state, double dt);

struct ThrottleReferenceInputs {
  double p_im_ref = 0, p_ic = 0, p_em = 0, T_im = 0, T_amb = 0, omega_e_ref = 0;
};

struct ThrottleReference {
  double W_ei_ref = 0, Pi_th_ref = 0, Psi_th_ref = 0, A_th_ref = 0;
};

// Required area for the reference air flow. Wide open when the requested
// pressure ratio leaves no drop across the throttle.
ThrottleReference throttle_area_reference(const ThrottleReferenceInputs& in,
                                          const EngineParams& params, double A_th_max);

// Positive root of the area polynomial, clamped to [alpha_min, alpha_max].
double throttle_feedforward(double A_th_ref, const ControllerGains& gains);
// Area produced by a throttle position; the exact inverse of the feedforward.
double throttle_area_from_position(double alpha, const ControllerGains& gains);

struct ControllerMeasurements {
  double p_im = 0, p_ic = 0, p_em = 0, T_im = 0;
};

struct ControllerReferences {
  double p_im_ref = 0, p_ic_ref = 0, omega_e_ref = 0;
};

struct ControllerSignals {
  double e_im = 0, e_ic = 0;
  double A_th_ref = 0, alpha_ff = 0, alpha_fb = 0, alpha = 0;
  double u_wg_fb = 0, u_wg = 0;
  double A_th = 0;
  bool alpha_saturated = false, u_wg_saturated = false;
};

class BoostController {
 public:
  BoostController(const ControllerGains& gains, const EngineParams& params, double T_amb);

  ControllerSignals step(const ControllerReferences& ref, const ControllerMeasurements& meas,
                         double dt);
  void reset();
  const PiState& throttle_state() const { return throttle_; }
  const PiState& wastegate_state() const { return wastegate_; }
  const ControllerSignals& last() const { return last_; }

 private:
  ControllerGains gains_;
  EngineParams params_;
  double T_amb_;
  double A_th_max_;
  PiState throttle_;
  PiState wastegate_;
  ControllerSignals last_;
};

}  // namespace tcsi
