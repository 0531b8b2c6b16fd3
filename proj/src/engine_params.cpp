#include "tcsi/engine_params.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "tcsi/error.hpp"
#include "tcsi/keyvalue.hpp"

namespace tcsi {
namespace {

using Field = std::pair<std::string_view, double EngineParams::*>;

constexpr std::array kFields = {
    Field{"R_a", &EngineParams::R_a},
    Field{"kappa_ic", &EngineParams::kappa_ic},
    Field{"c_vi", &EngineParams::c_vi},
    Field{"bore", &EngineParams::bore},
    Field{"V_d", &EngineParams::V_d},
    Field{"n_r", &EngineParams::n_r},
    Field{"r_c", &EngineParams::r_c},
    Field{"AF_s", &EngineParams::AF_s},
    Field{"C_eta_vol", &EngineParams::C_eta_vol},
    Field{"kappa_ei", &EngineParams::kappa_ei},
    Field{"V_im", &EngineParams::V_im},
    Field{"V_em", &EngineParams::V_em},
    Field{"T_0", &EngineParams::T_0},
    Field{"C_eo", &EngineParams::C_eo},
    Field{"q_HV", &EngineParams::q_HV},
    Field{"eta_ig", &EngineParams::eta_ig},
    Field{"C_Tq1", &EngineParams::C_Tq1},
    Field{"C_Tq2", &EngineParams::C_Tq2},
    Field{"p_amb_nominal", &EngineParams::p_amb_nominal},
    Field{"V_af", &EngineParams::V_af},
    Field{"H_af", &EngineParams::H_af},
    Field{"p_lin_af", &EngineParams::p_lin_af},
    Field{"V_c", &EngineParams::V_c},
    Field{"D_c", &EngineParams::D_c},
    Field{"R_c", &EngineParams::R_c},
    Field{"eta_c_max", &EngineParams::eta_c_max},
    Field{"eta_c_min", &EngineParams::eta_c_min},
    Field{"Phi_c_max", &EngineParams::Phi_c_max},
    Field{"Psi_c_max", &EngineParams::Psi_c_max},
    Field{"kappa_th", &EngineParams::kappa_th},
    Field{"dp_th_ref", &EngineParams::dp_th_ref},
    Field{"a0", &EngineParams::a0},
    Field{"a1", &EngineParams::a1},
    Field{"a2", &EngineParams::a2},
    Field{"V_ic", &EngineParams::V_ic},
    Field{"H_ic", &EngineParams::H_ic},
    Field{"p_lin_ic", &EngineParams::p_lin_ic},
    Field{"V_ex", &EngineParams::V_ex},
    Field{"kappa_em", &EngineParams::kappa_em},
    Field{"R_em", &EngineParams::R_em},
    Field{"c_ve", &EngineParams::c_ve},
    Field{"d_pipe", &EngineParams::d_pipe},
    Field{"l_pipe", &EngineParams::l_pipe},
    Field{"n_pipe", &EngineParams::n_pipe},
    Field{"h_ext", &EngineParams::h_ext},
    Field{"H_ex", &EngineParams::H_ex},
    Field{"p_lin_ex", &EngineParams::p_lin_ex},
    Field{"J_t", &EngineParams::J_t},
    Field{"omega_f", &EngineParams::omega_f},
    Field{"omega_t_init", &EngineParams::omega_t_init},
    Field{"omega_t_min", &EngineParams::omega_t_min},
    Field{"omega_t_max", &EngineParams::omega_t_max},
    Field{"d_t", &EngineParams::d_t},
    Field{"c_p_eg", &EngineParams::c_p_eg},
    Field{"eta_t_max", &EngineParams::eta_t_max},
    Field{"eta_t_min", &EngineParams::eta_t_min},
    Field{"BSR_eff_max", &EngineParams::BSR_eff_max},
    Field{"k1_t", &EngineParams::k1_t},
    Field{"k2_t", &EngineParams::k2_t},
    Field{"c_D_wg", &EngineParams::c_D_wg},
    Field{"A_wg_max", &EngineParams::A_wg_max},
};

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

}  // namespace

void EngineParams::validate() const {
  for (const auto& [name, member] : kFields) {
    require(std::isfinite(this->*member), std::string(name) + " must be finite");
  }
  for (double v : {R_a, R_em, c_vi, c_ve, V_af, V_c, V_ic, V_im, V_em, V_ex, V_d, H_af, H_ic,
                   H_ex, p_lin_af, p_lin_ic, p_lin_ex, R_c, J_t, d_t, c_p_eg, p_amb_nominal}) {
    require(v > 0.0, "volumes, resistances, gas constants and sizes must be positive");
  }
  require(kappa_ic > 1.0 && kappa_ei > 1.0 && kappa_em > 1.0, "kappa values must exceed 1");
  require(kappa_th > 1.0, "kappa_th must exceed 1");
  require(eta_c_max > 0.0 && eta_c_max <= 1.0, "eta_c_max must lie in (0, 1]");
  require(eta_t_max > 0.0 && eta_t_max <= 1.0, "eta_t_max must lie in (0, 1]");
  require(eta_c_min > 0.0 && eta_c_min <= eta_c_max, "eta_c_min must lie in (0, eta_c_max]");
  require(eta_t_min > 0.0 && eta_t_min <= eta_t_max, "eta_t_min must lie in (0, eta_t_max]");
  require(omega_t_min > 0.0 && omega_t_min < omega_t_max, "need 0 < omega_t_min < omega_t_max");
  require(omega_t_init >= omega_t_min && omega_t_init <= omega_t_max,
          "omega_t_init outside [omega_t_min, omega_t_max]");
  require(n_cyl > 0 && n_r > 0.0 && r_c > 1.0 && AF_s > 0.0, "invalid engine block constants");
  require(a2 != 0.0, "a2 must be nonzero");
  require(Phi_c_max > 0.0 && Psi_c_max > 0.0 && BSR_eff_max > 0.0, "map maxima must be positive");
}

void AmbientConditions::validate() const {
  if (!(p_amb > 0.0) || !(T_amb > 0.0)) {
    throw InvalidParameter("ambient pressure and temperature must be positive");
  }
}

void set_engine_param(EngineParams& params, std::string_view key, double value) {
  if (key == "n_cyl") {
    if (value != std::floor(value)) throw ConfigError("n_cyl must be an integer");
    params.n_cyl = static_cast<int>(value);
    return;
  }
  for (const auto& [name, member] : kFields) {
    if (name == key) {
      params.*member = value;
      return;
    }
  }
  throw ConfigError("unknown engine parameter '" + std::string(key) + "'");
}

double get_engine_param(const EngineParams& params, std::string_view key) {
  if (key == "n_cyl") return params.n_cyl;
  for (const auto& [name, member] : kFields) {
    if (name == key) return params.*member;
  }
  throw ConfigError("unknown engine parameter '" + std::string(key) + "'");
}

std::vector<std::string> engine_param_names() {
  std::vector<std::string> names;
  for (const auto& f : kFields) names.emplace_back(f.first);
  names.emplace_back("n_cyl");
  return names;
}

EngineParams parse_engine_params(std::string_view text, std::string_view origin) {
  EngineParams params;
  std::set<std::string> seen;
  for (const auto& kv : parse_key_values(text, origin)) {
    if (!seen.insert(kv.key).second) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(kv.line) +
                        ": duplicate key '" + kv.key + "'");
    }
    set_engine_param(params, kv.key, parse_double(kv.value, kv.key));
  }
  if (!seen.count("c_vi") && (seen.count("R_a") || seen.count("kappa_ic"))) {
    params.c_vi = params.R_a / (params.kappa_ic - 1.0);
  }
  if (!seen.count("c_ve") && (seen.count("R_em") || seen.count("kappa_em"))) {
    params.c_ve = params.R_em / (params.kappa_em - 1.0);
  }
  params.validate();
  return params;
}

EngineParams load_engine_params(const std::filesystem::path& path) {
  return parse_engine_params(read_text_file(path), path.string());
}

std::string format_engine_params(const EngineParams& params) {
  std::ostringstream out;
  for (const auto& name : engine_param_names()) {
    out << name << " = " << format_double(get_engine_param(params, name)) << '\n';
  }
  return out.str();
}

}  // namespace tcsi
