#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tcsi {

// Physical constants of the engine testbed. Defaults are the bench values;
// anything marked "derived" is computed from other entries unless overridden.
struct EngineParams {
  // Ambient air
  double R_a = 287.2;
  double kappa_ic = 1.4;
  double c_vi = 718.0;  // derived: R_a / (kappa_ic - 1)

  // Engine block
  double bore = 0.0831;
  double V_d = 0.0018;
  int n_cyl = 4;
  double n_r = 2.0;
  double r_c = 9.5;
  double AF_s = 15.1;
  double C_eta_vol = 0.8;
  double kappa_ei = 1.3;
  double V_im = 0.0018;
  double V_em = 0.0025;
  double T_0 = 1100.0;
  double C_eo = 3000.0;
  double q_HV = 4.4e7;
  double eta_ig = 0.4;

  // Affine BMEP(p_im) torque map: BMEP = C_Tq2 / p_nominal * p_im - C_Tq1
  double C_Tq1 = 0.2e6;
  double C_Tq2 = 1.2e6;
  double p_amb_nominal = 101325.0;

  // Air filter
  double V_af = 0.01;
  double H_af = 2e8;
  double p_lin_af = 2000.0;

  // Compressor. R_c is the wheel size used in the flow and head
  // coefficients (see README, "Compressor wheel size").
  double V_c = 0.005;
  double D_c = 0.06;
  double R_c = 0.06;
  double eta_c_max = 0.8;
  double eta_c_min = 0.3;
  double Phi_c_max = 0.12;
  double Psi_c_max = 2.3;

  // Throttle
  double kappa_th = 2.0;
  double dp_th_ref = 10000.0;
  double a0 = 1.1647e-5;
  double a1 = 3.0718e-5;
  double a2 = 0.0029;

  // Intercooler
  double V_ic = 0.005;
  double H_ic = 4e8;
  double p_lin_ic = 500.0;

  // Exhaust
  double V_ex = 0.02;
  double kappa_em = 1.3;
  double R_em = 290.0;
  double c_ve = 290.0 / 0.3;  // derived: R_em / (kappa_em - 1)
  double d_pipe = 0.04;
  double l_pipe = 0.45;
  double n_pipe = 4.0;
  double h_ext = 95.0;
  double H_ex = 3e8;
  double p_lin_ex = 300.0;

  // Turbocharger shaft
  double J_t = 3e-5;
  double omega_f = 1e-6;
  double omega_t_init = 3000.0;
  double omega_t_min = 2000.0;
  double omega_t_max = 2.4e4;

  // Turbine and wastegate. k1_t multiplies p_em in kPa.
  double d_t = 0.05;
  double c_p_eg = 1200.0;
  double eta_t_max = 0.75;
  double eta_t_min = 0.3;
  double BSR_eff_max = 0.7;
  double k1_t = 0.017;
  double k2_t = 1.4;
  double c_D_wg = 0.9;
  double A_wg_max = 3.5e-4;

  double cp_air() const { return R_a + c_vi; }
  double cp_exhaust() const { return R_em * kappa_em / (kappa_em - 1.0); }
  double bmep_offset() const { return C_Tq1; }                   // C_P0
  double bmep_slope() const { return C_Tq2 / p_amb_nominal; }    // C_P1

  // Throws InvalidParameter on the first violated invariant.
  void validate() const;
};

struct AmbientConditions {
  double p_amb = 101325.0;
  double T_amb = 293.15;

  void validate() const;
};

// Sets one named field. Throws ConfigError for unknown names.
void set_engine_param(EngineParams& params, std::string_view key, double value);
double get_engine_param(const EngineParams& params, std::string_view key);
std::vector<std::string> engine_param_names();

// Reads "key = value" lines (# comments) on top of the defaults. Setting
// R_a, kappa_ic, R_em or kappa_em refreshes c_vi / c_ve unless those are
// given explicitly in the same file.
EngineParams load_engine_params(const std::filesystem::path& path);
EngineParams parse_engine_params(std::string_view text, std::string_view origin = "<string>");
std::string format_engine_params(const EngineParams& params);

}  // namespace tcsi
