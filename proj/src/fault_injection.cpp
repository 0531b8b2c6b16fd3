#include "tcsi/fault_injection.hpp"

#include <algorithm>
#include <cmath>

#include "tcsi/error.hpp"

namespace tcsi {

std::string_view fault_name(FaultId id) { return kFaultNames[fault_index(id)]; }

std::size_t fault_index(FaultId id) { return static_cast<std::size_t>(id); }

FaultId parse_fault_id(std::string_view name) {
  for (std::size_t i = 0; i < kFaultCount; ++i) {
    if (kFaultNames[i] == name) return kAllFaults[i];
  }
  throw ConfigError("unknown fault '" + std::string(name) +
                    "' (expected none, f_paf, f_Cvol, f_Waf, f_Wc, f_Wic, f_Wth, f_xth, "
                    "f_yWaf, f_ypim, f_ypic, f_yTic)");
}

std::optional<FaultId> parse_fault_selection(std::string_view name) {
  if (name == "none" || name.empty()) return std::nullopt;
  return parse_fault_id(name);
}

bool is_sensor_fault(FaultId id) {
  return id == FaultId::f_ypic || id == FaultId::f_ypim || id == FaultId::f_yTic ||
         id == FaultId::f_yWaf;
}

void FaultProfile::validate(double T_DC) const {
  if (!(magnitude > 0.0)) throw ConfigError("fault magnitude must be positive");
  const double s = start.resolve(T_DC), e = end.resolve(T_DC);
  if (!(s >= 0.0) || !(e >= s)) throw ConfigError("fault window must satisfy 0 <= start <= end");
  if (shape == FaultShape::pulsed && !(period > 0.0 && on_time > 0.0 && on_time < period)) {
    throw ConfigError("pulsed fault needs 0 < on_time < period");
  }
}

FaultProfile catalog_profile(FaultId id) {
  FaultProfile p;
  p.id = id;
  auto abrupt = [&](TimePoint s, TimePoint e) {
    p.shape = FaultShape::abrupt;
    p.start = s;
    p.end = e;
  };
  auto incipient_from_200 = [&] {
    p.shape = FaultShape::incipient;
    p.start = {200.0, false};
    p.end = {1.0, true};
  };
  auto pulsed = [&](double on, double period) {
    p.shape = FaultShape::pulsed;
    p.start = {0.0, false};
    p.end = {1.0, true};
    p.on_time = on;
    p.period = period;
  };
  p.magnitude = 0.2;
  switch (id) {
    case FaultId::f_paf:
      p.magnitude = 20000.0;
      abrupt({200.0, false}, {1.0, true});
      break;
    case FaultId::f_Cvol: pulsed(30.0, 150.0); break;
    case FaultId::f_Waf: incipient_from_200(); break;
    case FaultId::f_Wc: abrupt({0.4, true}, {1.0, true}); break;
    case FaultId::f_Wic: abrupt({0.4, true}, {0.8, true}); break;
    case FaultId::f_Wth: pulsed(40.0, 200.0); break;
    case FaultId::f_xth: abrupt({0.4, true}, {1.0, true}); break;
    case FaultId::f_ypic: pulsed(40.0, 200.0); break;
    case FaultId::f_ypim: incipient_from_200(); break;
    case FaultId::f_yTic:
      p.magnitude = 20.0;
      pulsed(30.0, 150.0);
      break;
    case FaultId::f_yWaf: pulsed(30.0, 150.0); break;
  }
  return p;
}

FaultSchedule FaultSchedule::none(double T_DC) { return FaultSchedule{std::nullopt, T_DC}; }

FaultSchedule FaultSchedule::single(FaultId id, double T_DC) {
  return FaultSchedule{catalog_profile(id), T_DC};
}

void FaultSchedule::validate() const {
  if (!(T_DC > 0.0)) throw ConfigError("cycle duration must be positive");
  if (profile) profile->validate(T_DC);
}

std::vector<Window> FaultSchedule::active_windows() const {
  std::vector<Window> out;
  if (!profile) return out;
  const FaultProfile& p = *profile;
  const double s = p.start.resolve(T_DC);
  const double e = std::min(p.end.resolve(T_DC), T_DC);
  if (s > e) return out;
  if (p.shape != FaultShape::pulsed) {
    out.emplace_back(s, e);
    return out;
  }
  for (int k = 1; k * p.period <= e; ++k) {
    const double on = k * p.period;
    if (on < s) continue;
    out.emplace_back(on, std::min(on + p.on_time, e));
  }
  return out;
}

double activation(double t, const FaultProfile& p, double T_DC) {
  const double s = p.start.resolve(T_DC);
  const double e = std::min(p.end.resolve(T_DC), T_DC);
  if (t < s || t > e) return 0.0;
  switch (p.shape) {
    case FaultShape::abrupt:
      return 1.0;
    case FaultShape::incipient:
      return e > s ? (t - s) / (e - s) : 1.0;
    case FaultShape::pulsed:
      if (t < p.period) return 0.0;
      return std::fmod(t, p.period) < p.on_time ? 1.0 : 0.0;
  }
  return 0.0;
}

double leakage_psi(double ratio, double kappa) {
  const double crit = std::pow(2.0 / (kappa + 1.0), kappa / (kappa - 1.0));
  if (ratio >= 1.0) return 0.0;
  if (ratio >= crit) {
    const double inner = std::pow(ratio, 2.0 / kappa) - std::pow(ratio, (kappa + 1.0) / kappa);
    return std::sqrt(2.0 * kappa / (kappa - 1.0) * std::max(inner, 0.0));
  }
  return std::sqrt(kappa * std::pow(2.0 / (kappa + 1.0), (kappa + 1.0) / (kappa - 1.0)));
}

double leakage_flow(double p_high, double p_low, double T_amb, double k_leak_mm2, double kappa) {
  if (!(p_low > 0.0) || !(p_high >= p_low) || !(T_amb > 0.0)) {
    throw InvalidParameter("leakage_flow needs p_high >= p_low > 0 and T_amb > 0");
  }
  return k_leak_mm2 * 1e-6 * p_high / std::sqrt(T_amb) * leakage_psi(p_low / p_high, kappa);
}

double calibrate_leak_area(double p_high, double p_low, double T_amb, double kappa,
                           double target_flow, double tol) {
  const double unit = leakage_flow(p_high, p_low, T_amb, 1.0, kappa);
  if (!(unit > 0.0) || !(target_flow >= 0.0)) {
    throw InvalidParameter("leak calibration needs a pressure drop and a non-negative target");
  }
  double lo = 0.0, hi = 1.0;
  while (leakage_flow(p_high, p_low, T_amb, hi, kappa) < target_flow) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (leakage_flow(p_high, p_low, T_amb, mid, kappa) < target_flow ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FaultContext make_fault_context(const EngineState& s, const ActuatorCommand& cmd,
                                const AlgebraicOutputs& a) {
  FaultContext c;
  c.W_af = a.W_af;
  c.W_c = a.W_c;
  c.W_ic = a.W_ic;
  c.W_th = a.W_th;
  c.W_ei = a.W_ei;
  c.A_th = cmd.A_th;
  c.p_amb = cmd.p_amb;
  c.T_amb = cmd.T_amb;
  c.p_af = s.p_af;
  c.T_af = s.T_af;
  c.p_im = s.p_im;
  c.p_ic = s.p_ic;
  return c;
}

FaultSignals realize(double t, const FaultSchedule& schedule, const FaultContext& c,
                     const EngineParams& params) {
  FaultSignals f;
  if (!schedule.profile) return f;
  const FaultProfile& p = *schedule.profile;
  const double act = activation(t, p, schedule.T_DC);
  if (act == 0.0) return f;
  const double k = p.magnitude * act;
  switch (p.id) {
    case FaultId::f_paf: {
      auto filter_flow = [&](double p_up) {
        const double T_in = p_up >= c.p_af ? c.T_amb : c.T_af;
        return restriction_flow(p_up, c.p_af, T_in, params.H_af, params.p_lin_af);
      };
      const double reduced = std::max(c.p_amb - k, 1.0);
      f.f_paf = filter_flow(reduced) - filter_flow(c.p_amb);
      break;
    }
    case FaultId::f_Cvol: f.f_Cvol = -k * c.W_ei; break;
    case FaultId::f_Waf: f.f_Waf = -k * c.W_af; break;
    case FaultId::f_Wc: f.f_Wc = -k * c.W_c; break;
    case FaultId::f_Wic: f.f_Wic = -k * c.W_ic; break;
    case FaultId::f_Wth: f.f_Wth = -k * c.W_th; break;
    case FaultId::f_xth: f.f_xth = -k * c.A_th; break;
    case FaultId::f_ypic: f.f_ypic = k * c.p_ic; break;
    case FaultId::f_ypim: f.f_ypim = k * c.p_im; break;
    case FaultId::f_yTic: f.f_yTic = k; break;
    case FaultId::f_yWaf: f.f_yWaf = k * c.W_af; break;
  }
  return f;
}

}  // namespace tcsi
