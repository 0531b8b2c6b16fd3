#include "tcsi/engine_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tcsi/error.hpp"

namespace tcsi {
namespace {

constexpr double kPi = std::numbers::pi;
// Shaft speed used in divisions when a caller passes an unclamped state.
constexpr double kOmegaGuard = 1.0;

struct VolumeRates {
  double dT;
  double dp;
};

// Mass and energy balance of an adiabatic volume. `W_a` enters at `T_a`,
// `W_b` leaves at `T_b`; both are signed.
VolumeRates volume_balance(double T, double p, double V, double R, double c_v, double W_a,
                           double T_a, double W_b, double T_b) {
  const double c_p = R + c_v;
  const double dT = R * T / (p * V * c_v) * (c_p * W_a * T_a - c_p * W_b * T_b - (W_a - W_b) * c_v * T);
  const double dp = R * T / V * (W_a - W_b) + p / T * dT;
  return {dT, dp};
}

}  // namespace

StateVector EngineState::to_vector() const {
  return {T_af, p_af, T_c, p_c, T_ic, p_ic, T_im, p_im, T_em, p_em, T_t, p_t, omega_t};
}

EngineState EngineState::from_vector(const StateVector& v) {
  EngineState s;
  s.T_af = v[0];
  s.p_af = v[1];
  s.T_c = v[2];
  s.p_c = v[3];
  s.T_ic = v[4];
  s.p_ic = v[5];
  s.T_im = v[6];
  s.p_im = v[7];
  s.T_em = v[8];
  s.p_em = v[9];
  s.T_t = v[10];
  s.p_t = v[11];
  s.omega_t = v[12];
  return s;
}

EngineState EngineState::initial(const EngineParams& params, const AmbientConditions& ambient) {
  StateVector v{};
  for (std::size_t i = 0; i < 12; i += 2) {
    v[i] = ambient.T_amb;
    v[i + 1] = ambient.p_amb;
  }
  v[12] = params.omega_t_init;
  return from_vector(v);
}

void ActuatorCommand::validate() const {
  if (!(A_th >= 0.0)) throw InvalidParameter("A_th must be non-negative");
  if (!(u_wg >= 0.0 && u_wg <= 1.0)) throw InvalidParameter("u_wg must lie in [0, 1]");
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
  if (!(p_amb > 0.0 && T_amb > 0.0)) throw InvalidParameter("ambient must be positive");
}

std::array<double, kFaultCount> FaultSignals::to_array() const {
  return {f_paf, f_Cvol, f_Waf, f_Wc, f_Wic, f_Wth, f_xth, f_ypic, f_ypim, f_yTic, f_yWaf};
}

bool FaultSignals::all_zero() const {
  for (double v : to_array()) {
    if (v != 0.0) return false;
  }
  return true;
}

std::array<double, kSensorCount> SensorReading::to_array() const {
  return {y_Tc, y_pc, y_Tic, y_pic, y_Tim, y_pim, y_Waf, y_Tqe, y_pem};
}

SensorReading SensorReading::from_array(const std::array<double, kSensorCount>& a) {
  return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
}

double restriction_flow(double p_up, double p_down, double T_in, double H, double p_lin) {
  if (!(T_in > 0.0)) throw InvalidParameter("restriction_flow: temperature must be positive");
  if (!(H > 0.0)) throw InvalidParameter("restriction_flow: resistance must be positive");
  if (!(p_lin > 0.0)) throw InvalidParameter("restriction_flow: p_lin must be positive");
  if (!(p_up > 0.0 && p_down > 0.0)) {
    throw InvalidParameter("restriction_flow: pressures must be positive");
  }
  const double dp = p_up - p_down;
  const double adp = std::abs(dp);
  const double scale = std::sqrt(std::max(p_up, p_down) / (H * T_in));
  const double root = adp >= p_lin ? std::sqrt(adp) : adp / std::sqrt(p_lin);
  return dp >= 0.0 ? scale * root : -scale * root;
}

double critical_pressure_ratio(double kappa) {
  return std::pow(2.0 / (kappa + 1.0), kappa / (kappa - 1.0));
}

double nozzle_flow_function(double pressure_ratio, double kappa) {
  if (pressure_ratio >= 1.0) return 0.0;
  const double Pi = std::max(pressure_ratio, 0.0);
  if (Pi <= critical_pressure_ratio(kappa)) {
    return std::sqrt(kappa) * std::pow(2.0 / (kappa + 1.0), (kappa + 1.0) / (2.0 * (kappa - 1.0)));
  }
  const double inner = std::pow(Pi, 2.0 / kappa) - std::pow(Pi, (kappa + 1.0) / kappa);
  return std::sqrt(2.0 * kappa / (kappa - 1.0) * std::max(inner, 0.0));
}

CompressorOutputs compressor(const EngineState& state, const EngineParams& params, double f_Wc) {
  CompressorOutputs out;
  const double omega = std::max(state.omega_t, kOmegaGuard);
  const double c_p = params.cp_air();
  const double head = std::pow(state.p_c / state.p_af, (params.kappa_ic - 1.0) / params.kappa_ic) - 1.0;
  const double Rc = params.R_c;

  out.Pi_c = state.p_c / state.p_af;
  out.Psi_c = 4.0 * kPi * kPi * c_p * state.T_af / (Rc * Rc * omega * omega) * head;
  double arg = 1.0 - out.Psi_c / (params.Psi_c_max * params.Psi_c_max);
  if (arg < 0.0) {
    arg = 0.0;
    out.surge_clamped = true;
  }
  arg = std::min(arg, 1.0);
  const double swept = Rc * Rc * Rc * omega * state.p_af;
  out.W_c = std::sqrt(arg) * params.Phi_c_max * swept / (2.0 * kPi * state.T_af * params.R_a) + f_Wc;
  out.Phi_c = 2.0 * kPi * out.W_c * params.R_a * state.T_af / swept;

  const double eta_raw =
      out.Phi_c * params.eta_c_max / (params.Phi_c_max * params.Phi_c_max) *
      (2.0 * params.Phi_c_max - out.Phi_c);
  out.eta_c = std::clamp(eta_raw, params.eta_c_min, params.eta_c_max);
  out.Tq_c = out.W_c * c_p * state.T_af / (out.eta_c * omega) * head;
  out.T_c_in = state.T_af * (1.0 + std::max(head, 0.0) / out.eta_c);
  return out;
}

double throttle_flow(double p_ic, double p_im, double T_ic, double A_th, double f_Wth,
                     double f_xth, const EngineParams& params) {
  const double area = std::max(A_th + f_xth, 0.0);
  const double Psi = nozzle_flow_function(p_im / p_ic, params.kappa_th);
  return p_ic * area / std::sqrt(T_ic * params.R_a) * Psi + f_Wth;
}

EngineFlows engine_flows(double p_im, double T_im, double p_em, double omega_e, double lambda,
                         double f_Cvol, double T_amb, const EngineParams& params) {
  EngineFlows out;
  const double residual_gas = std::pow(p_em / p_im, 1.0 / params.kappa_ei);
  const double eta_vol = params.C_eta_vol * (params.r_c - residual_gas) / (params.r_c - 1.0);
  const double W_nominal =
      eta_vol * params.V_d * omega_e * p_im / (4.0 * kPi * params.R_a * T_im);
  out.W_ei = std::max(W_nominal, 0.0) + f_Cvol;
  out.W_f = out.W_ei / (params.AF_s * lambda);
  out.W_eo = out.W_ei + out.W_f;
  out.T_eo = out.W_eo * params.C_eo + params.T_0;

  const double conductance =
      params.h_ext * kPi * params.d_pipe * params.l_pipe * params.n_pipe;
  const double capacity = out.W_eo * params.cp_exhaust();
  out.T_t_in = capacity > 1e-12
                   ? T_amb + (out.T_eo - T_amb) * std::exp(-conductance / capacity)
                   : T_amb;
  return out;
}

TurbineOutputs turbine_wastegate(const EngineState& state, double u_wg,
                                 const EngineParams& params) {
  TurbineOutputs out;
  const double kappa = params.kappa_em;
  const double omega = std::max(state.omega_t, kOmegaGuard);
  out.Pi_t = state.p_t / state.p_em;
  out.T_wg = state.p_em > state.p_t ? state.T_em : state.T_t;
  out.Psi_t = nozzle_flow_function(out.Pi_t, kappa);
  out.W_wg = state.p_em * u_wg * params.c_D_wg * params.A_wg_max /
             std::sqrt(state.T_em * params.R_em) * out.Psi_t;

  if (out.Pi_t < 1.0) {
    const double drop = 1.0 - std::pow(out.Pi_t, (kappa - 1.0) / kappa);
    out.BSR = params.d_t * omega / (2.0 * std::sqrt(2.0 * params.c_p_eg * state.T_em * drop));
    const double dev = (out.BSR - params.BSR_eff_max) / params.BSR_eff_max;
    out.eta_t = std::clamp(params.eta_t_max * (1.0 - dev * dev), params.eta_t_min, params.eta_t_max);
    out.T_t_out = state.T_em * drop * out.eta_t;
    const double p_em_kpa = state.p_em * 1e-3;
    out.W_t = params.k1_t * p_em_kpa / std::sqrt(state.T_em) *
              std::sqrt(1.0 - std::pow(out.Pi_t, params.k2_t));
    out.Tq_t = out.W_t * params.c_p_eg * out.T_t_out / omega;
  } else {
    out.eta_t = params.eta_t_min;
  }

  out.W_turbo = -(out.W_t + out.W_wg);
  const double total = out.W_t + out.W_wg;
  out.T_turbo = total > 0.0
                    ? (out.W_t * (state.T_em - out.T_t_out) + out.W_wg * out.T_wg) / total
                    : state.T_em;
  return out;
}

double torque_model(double p_im, const EngineParams& params) {
  const double bmep = params.bmep_slope() * p_im - params.bmep_offset();
  return std::max(params.V_d * bmep / (2.0 * kPi * params.n_r), 0.0);
}

AlgebraicOutputs eval_algebraic(const EngineState& s, const ActuatorCommand& cmd,
                                const FaultSignals& f, const EngineParams& params) {
  AlgebraicOutputs a;
  a.omega_e = cmd.omega_e_ref;

  a.T_af_in = cmd.p_amb >= s.p_af ? cmd.T_amb : s.T_af;
  a.W_af = restriction_flow(cmd.p_amb, s.p_af, a.T_af_in, params.H_af, params.p_lin_af) +
           f.f_paf;

  const CompressorOutputs c = compressor(s, params);
  a.W_c = c.W_c;
  a.Tq_c = c.Tq_c;
  a.Pi_c = c.Pi_c;
  a.Psi_c = c.Psi_c;
  a.Phi_c = c.Phi_c;
  a.eta_c = c.eta_c;
  a.T_c_in = c.T_c_in;
  a.surge_clamped = c.surge_clamped;

  a.T_ic_in = s.p_c >= s.p_ic ? s.T_c : s.T_ic;
  a.W_ic = restriction_flow(s.p_c, s.p_ic, a.T_ic_in, params.H_ic, params.p_lin_ic);

  a.T_im_in = s.p_ic >= s.p_im ? s.T_ic : s.T_im;
  a.Pi_th = s.p_im / s.p_ic;
  a.Pi_th_crit = critical_pressure_ratio(params.kappa_th);
  a.Psi_th = nozzle_flow_function(a.Pi_th, params.kappa_th);
  a.A_th_eff = std::max(cmd.A_th + f.f_xth, 0.0);
  a.W_th = throttle_flow(s.p_ic, s.p_im, s.T_ic, cmd.A_th, 0.0, f.f_xth, params);

  const EngineFlows e = engine_flows(s.p_im, s.T_im, s.p_em, a.omega_e, cmd.lambda, f.f_Cvol,
                                     cmd.T_amb, params);
  a.W_ei = e.W_ei;
  a.W_f = e.W_f;
  a.W_eo = e.W_eo;
  a.T_eo = e.T_eo;
  a.T_t_in = e.T_t_in;

  const TurbineOutputs t = turbine_wastegate(s, cmd.u_wg, params);
  a.W_t = t.W_t;
  a.W_wg = t.W_wg;
  a.W_turbo = t.W_turbo;
  a.Tq_t = t.Tq_t;
  a.eta_t = t.eta_t;
  a.T_t_out = t.T_t_out;
  a.T_turbo = t.T_turbo;
  a.T_wg = t.T_wg;
  a.BSR = t.BSR;
  a.Pi_t = t.Pi_t;
  a.Pi_t_crit = critical_pressure_ratio(params.kappa_em);
  a.Psi_t = t.Psi_t;

  a.T_exh = cmd.p_amb >= s.p_t ? cmd.T_amb : s.T_t;
  a.W_exh = restriction_flow(cmd.p_amb, s.p_t, a.T_exh, params.H_ex, params.p_lin_ex);

  a.Tq_e = torque_model(s.p_im, params);
  return a;
}

SensorReading sensor_outputs(const EngineState& s, const AlgebraicOutputs& a,
                             const FaultSignals& f) {
  SensorReading y;
  y.y_Tc = s.T_c;
  y.y_pc = s.p_c;
  y.y_Tic = s.T_ic + f.f_yTic;
  y.y_pic = s.p_ic + f.f_ypic;
  y.y_Tim = s.T_im;
  y.y_pim = s.p_im + f.f_ypim;
  y.y_Waf = a.W_af + f.f_yWaf;
  y.y_Tqe = a.Tq_e;
  y.y_pem = s.p_em;
  return y;
}

Evaluation eval_derivatives(const EngineState& s, const ActuatorCommand& cmd,
                            const FaultSignals& f, const EngineParams& params, double t) {
  const StateVector v = s.to_vector();
  for (std::size_t i = 0; i < 12; ++i) {
    if (!std::isfinite(v[i]) || v[i] <= 0.0) {
      throw ModelBlowup("e" + std::to_string(i + 1), t,
                        std::string(kStateNames[i]) + " = " + std::to_string(v[i]));
    }
  }
  if (!std::isfinite(s.omega_t)) throw ModelBlowup("e13", t, "omega_t not finite");

  Evaluation ev;
  AlgebraicOutputs& a = ev.alg;
  a = eval_algebraic(s, cmd, f, params);

  const struct {
    const char* eq;
    double value;
  } checks[] = {{"e15", a.W_af}, {"e17", a.W_c},   {"e21", a.Tq_c},  {"e23", a.W_ic},
                {"e25", a.W_th}, {"e29", a.W_ei},  {"e33", a.T_t_in}, {"e35", a.W_wg},
                {"e42", a.W_t},  {"e43", a.Tq_t},  {"e45", a.T_turbo}, {"e47", a.W_exh}};
  for (const auto& c : checks) {
    if (!std::isfinite(c.value)) throw ModelBlowup(c.eq, t, "non-finite algebraic output");
  }

  const double R = params.R_a, cv = params.c_vi;
  const double Re = params.R_em, cve = params.c_ve;
  // Flow faults act as leaks between a component and the next volume: the
  // upstream side and the flow sensor see the undisturbed flow.
  const VolumeRates af = volume_balance(s.T_af, s.p_af, params.V_af, R, cv, a.W_af + f.f_Waf, a.T_af_in, a.W_c, s.T_af);
  const VolumeRates c = volume_balance(s.T_c, s.p_c, params.V_c, R, cv, a.W_c + f.f_Wc, a.T_c_in, a.W_ic, s.T_c);
  const VolumeRates ic = volume_balance(s.T_ic, s.p_ic, params.V_ic, R, cv, a.W_ic + f.f_Wic, a.T_ic_in, a.W_th, s.T_ic);
  const VolumeRates im = volume_balance(s.T_im, s.p_im, params.V_im, R, cv, a.W_th + f.f_Wth, a.T_im_in, a.W_ei, s.T_im);
  const VolumeRates em = volume_balance(s.T_em, s.p_em, params.V_em, Re, cve, a.W_turbo, s.T_em, -a.W_eo, a.T_t_in);
  const VolumeRates ex = volume_balance(s.T_t, s.p_t, params.V_ex, Re, cve, a.W_exh, a.T_exh, a.W_turbo, a.T_turbo);
  const double domega = ((a.Tq_t - a.Tq_c) - params.omega_f * s.omega_t) / params.J_t;

  ev.derivative = {af.dT, af.dp, c.dT, c.dp, ic.dT, ic.dp, im.dT, im.dp,
                   em.dT, em.dp, ex.dT, ex.dp, domega};
  for (std::size_t i = 0; i < kStateCount; ++i) {
    if (!std::isfinite(ev.derivative[i])) {
      throw ModelBlowup("e" + std::to_string(i + 1), t,
                        "non-finite derivative of " + std::string(kStateNames[i]));
    }
  }
  ev.y = sensor_outputs(s, a, f);
  return ev;
}

}  // namespace tcsi
