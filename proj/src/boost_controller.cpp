#include "tcsi/boost_controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcsi/error.hpp"

namespace tcsi {

void ControllerGains::validate() const {
  if (!(Ti_th > 0.0 && Ti_wg > 0.0)) throw ConfigError("controller Ti must be positive");
  if (!(Kp_th > 0.0 && Kp_wg > 0.0)) throw ConfigError("controller Kp must be positive");
  if (!(Kaw_th >= 0.0 && Kaw_wg >= 0.0)) throw ConfigError("back-calculation gains must be >= 0");
  if (!(alpha_min < alpha_max)) throw ConfigError("alpha_min must be below alpha_max");
  if (!(u_wg_min < u_wg_max)) throw ConfigError("u_wg_min must be below u_wg_max");
  if (!(u_wg_min >= 0.0 && u_wg_max <= 1.0)) throw ConfigError("wastegate bounds must lie in [0, 1]");
  if (a2 == 0.0) throw ConfigError("a2 must be nonzero");
}

PiOutput pi_antiwindup_step(double error, double feedforward, double Kp, double Ti, double Kaw,
                            double u_min, double u_max, PiState& state, double dt) {
  PiOutput out;
  out.feedback = Kp * error + Kp / Ti * state.integrator;
  out.raw = feedforward + out.feedback;
  out.saturated = std::clamp(out.raw, u_min, u_max);
  out.saturated_flag = out.saturated != out.raw;
  state.integrator += (error + Kaw * (out.saturated - out.raw)) * dt;
  return out;
}

ThrottleReference throttle_area_reference(const ThrottleReferenceInputs& in,
                                          const EngineParams& params, double A_th_max) {
  ThrottleReference r;
  const double kappa = params.kappa_th;
  const double breathing = params.r_c - std::pow(in.p_em / in.p_im_ref, params.kappa_em);
  r.W_ei_ref = std::max(params.C_eta_vol * params.V_d * in.omega_e_ref * in.p_im_ref /
                            (4.0 * std::numbers::pi * params.R_a * (params.r_c - 1.0) * in.T_im) *
                            breathing,
                        0.0);
  r.Pi_th_ref = in.p_im_ref / std::max(in.p_im_ref, in.p_ic);
  const double Pi = r.Pi_th_ref;
  const double inner = std::pow(Pi, 2.0 / kappa) - std::pow(Pi, (kappa + 1.0) / kappa);
  r.Psi_th_ref = Pi * std::sqrt(2.0 * kappa / (kappa - 1.0) * std::max(inner, 0.0));
  if (r.W_ei_ref == 0.0) {
    r.A_th_ref = 0.0;
  } else if (r.Psi_th_ref <= 0.0) {
    r.A_th_ref = A_th_max;
  } else {
    r.A_th_ref = std::min(
        r.W_ei_ref * std::sqrt(params.R_a * in.T_amb) / (in.p_ic * r.Psi_th_ref), A_th_max);
  }
  return r;
}

double throttle_feedforward(double A_th_ref, const ControllerGains& g) {
  const double ratio = g.a1 / g.a2;
  const double arg = std::max((A_th_ref - g.a0) / g.a2 + ratio * ratio, 0.0);
  const double alpha = -g.a0 / (2.0 * g.a2) + std::sqrt(arg);
  return std::clamp(alpha, g.alpha_min, g.alpha_max);
}

double throttle_area_from_position(double alpha, const ControllerGains& g) {
  const double shifted = alpha + g.a0 / (2.0 * g.a2);
  const double ratio = g.a1 / g.a2;
  return std::max(g.a0 + g.a2 * (shifted * shifted - ratio * ratio), 0.0);
}

BoostController::BoostController(const ControllerGains& gains, const EngineParams& params,
                                 double T_amb)
    : gains_(gains), params_(params), T_amb_(T_amb) {
  gains_.validate();
  A_th_max_ = throttle_area_from_position(gains_.alpha_max, gains_);
}

void BoostController::reset() {
  throttle_ = {};
  wastegate_ = {};
  last_ = {};
}

ControllerSignals BoostController::step(const ControllerReferences& ref,
                                        const ControllerMeasurements& meas, double dt) {
  ControllerSignals s;
  ThrottleReferenceInputs in;
  in.p_im_ref = ref.p_im_ref;
  in.p_ic = meas.p_ic;
  in.p_em = meas.p_em;
  in.T_im = meas.T_im;
  in.T_amb = T_amb_;
  in.omega_e_ref = ref.omega_e_ref;
  s.A_th_ref = throttle_area_reference(in, params_, A_th_max_).A_th_ref;
  s.alpha_ff = throttle_feedforward(s.A_th_ref, gains_);

  s.e_im = ref.p_im_ref - meas.p_im;
  const PiOutput th =
      pi_antiwindup_step(s.e_im, s.alpha_ff, gains_.Kp_th, gains_.Ti_th, gains_.back_calculation_th(),
                         gains_.alpha_min, gains_.alpha_max, throttle_, dt);
  s.alpha_fb = th.feedback;
  s.alpha = th.saturated;
  s.alpha_saturated = th.saturated_flag;
  s.A_th = throttle_area_from_position(s.alpha, gains_);

  s.e_ic = meas.p_ic - ref.p_ic_ref;
  const PiOutput wg =
      pi_antiwindup_step(s.e_ic, 0.0, gains_.Kp_wg, gains_.Ti_wg, gains_.back_calculation_wg(),
                         gains_.u_wg_min, gains_.u_wg_max, wastegate_, dt);
  s.u_wg_fb = wg.feedback;
  s.u_wg = wg.saturated;
  s.u_wg_saturated = wg.saturated_flag;
  last_ = s;
  return s;
}

}  // namespace tcsi
