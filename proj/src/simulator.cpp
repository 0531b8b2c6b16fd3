#include "tcsi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tcsi/keyvalue.hpp"
#include "tcsi/ode.hpp"

namespace tcsi {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (log_decimation < 1) throw ConfigError("log decimation must be >= 1");
  if (!(warmup >= 0.0)) throw ConfigError("warm-up must be non-negative");
  if (!(noise.std_fraction >= 0.0)) throw ConfigError("noise std fraction must be >= 0");
  for (double fs : noise.full_scale) {
    if (!(fs > 0.0)) throw ConfigError("sensor full scale must be positive");
  }
  gains.validate();
  gearbox.validate();
  ambient.validate();
}

EngineState clamp_state(const EngineState& state, const EngineParams& params) {
  StateVector v = state.to_vector();
  for (std::size_t i = 0; i < 12; ++i) {
    if (std::isfinite(v[i])) v[i] = std::max(v[i], 1.0);
  }
  if (std::isfinite(v[12])) v[12] = std::clamp(v[12], params.omega_t_min, params.omega_t_max);
  return EngineState::from_vector(v);
}

EngineState rk4_step(const EngineState& state, const ActuatorCommand& cmd,
                     const FaultSignals& faults, const EngineParams& params, double dt,
                     double t) {
  auto f = [&](double tau, const StateVector& x) {
    return eval_derivatives(EngineState::from_vector(x), cmd, faults, params, tau).derivative;
  };
  const StateVector next = tcsi::rk4_step(f, state.to_vector(), t, dt);
  for (std::size_t i = 0; i < kStateCount; ++i) {
    if (!std::isfinite(next[i])) {
      throw ModelBlowup("e" + std::to_string(i + 1), t + dt,
                        "integration produced a non-finite " + std::string(kStateNames[i]));
    }
  }
  return clamp_state(EngineState::from_vector(next), params);
}

std::size_t SimResult::trace_index_of_row(std::size_t row) const {
  return warmup_steps + row * static_cast<std::size_t>(log_decimation);
}

ActuatorCommand SimResult::command_at(std::size_t step) const {
  ActuatorCommand c;
  c.A_th = trace_A_th.at(step);
  c.u_wg = trace_u_wg.at(step);
  c.omega_e_ref = trace_omega_e.at(step);
  c.lambda = lambda;
  c.p_amb = ambient.p_amb;
  c.T_amb = ambient.T_amb;
  return c;
}

SimResult run_closed_loop(const SimConfig& config, const EngineParams& params) {
  return run_closed_loop(config, params, load_cycle(config.cycle));
}

SimResult run_closed_loop(const SimConfig& config, const EngineParams& params,
                          const DrivingCycle& cycle) {
  config.validate();
  params.validate();
  cycle.validate();

  auto result = std::make_shared<SimResult>();
  SimResult& r = *result;
  r.cycle_name = cycle.name;
  r.fault_name = config.fault ? std::string(fault_name(*config.fault)) : "none";
  r.T_DC = cycle.duration();
  r.dt = config.dt;
  r.log_decimation = config.log_decimation;
  r.seed = config.seed;
  r.ambient = config.ambient;

  const FaultSchedule schedule =
      config.fault ? FaultSchedule::single(*config.fault, r.T_DC) : FaultSchedule::none(r.T_DC);
  schedule.validate();
  r.fault_windows = schedule.active_windows();
  const std::size_t fault_col = config.fault ? fault_index(*config.fault) : 0;

  const auto warm = static_cast<std::size_t>(std::llround(config.warmup / config.dt));
  const auto steps = static_cast<std::size_t>(std::llround(r.T_DC / config.dt));
  const std::size_t total = warm + steps;
  r.warmup_steps = warm;

  ReferenceGenerator refs(cycle, config.gearbox, params);
  BoostController controller(config.gains, params, config.ambient.T_amb);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  EngineState state = EngineState::initial(params, config.ambient);
  r.initial_state = state;
  ActuatorCommand cmd;
  cmd.lambda = r.lambda;
  cmd.p_amb = config.ambient.p_amb;
  cmd.T_amb = config.ambient.T_amb;

  const std::size_t rows = (steps + config.log_decimation - 1) / config.log_decimation;
  r.trace_A_th.reserve(total);
  r.trace_u_wg.reserve(total);
  r.trace_omega_e.reserve(total);
  for (auto* v : {&r.time, &r.omega_e_ref, &r.Tq_e_ref, &r.p_im_ref, &r.p_ic_ref, &r.Tq_e}) {
    v->reserve(rows);
  }

  for (std::size_t k = 0; k < total; ++k) {
    const double t = (static_cast<double>(k) - static_cast<double>(warm)) * config.dt;
    const ReferencePoint ref = refs.at(t);
    cmd.omega_e_ref = ref.omega_e_ref;

    FaultSignals faults;
    AlgebraicOutputs alg = eval_algebraic(state, cmd, faults, params);
    if (schedule.profile && t >= 0.0) {
      faults = realize(t, schedule, make_fault_context(state, cmd, alg), params);
      if (!faults.all_zero()) alg = eval_algebraic(state, cmd, faults, params);
    }
    std::array<double, kSensorCount> y = sensor_outputs(state, alg, faults).to_array();
    if (config.noise.enabled) {
      for (std::size_t i = 0; i < kSensorCount; ++i) y[i] += normal(rng) * config.noise.stddev(i);
    }

    const ControllerSignals sig = controller.step({ref.p_im_ref, ref.p_ic_ref, ref.omega_e_ref},
                                                  {y[5], y[3], y[8], y[4]}, config.dt);
    cmd.A_th = sig.A_th;
    cmd.u_wg = sig.u_wg;
    r.trace_A_th.push_back(cmd.A_th);
    r.trace_u_wg.push_back(cmd.u_wg);
    r.trace_omega_e.push_back(cmd.omega_e_ref);

    if (k >= warm && (k - warm) % static_cast<std::size_t>(config.log_decimation) == 0) {
      r.time.push_back(t);
      r.omega_e_ref.push_back(ref.omega_e_ref);
      r.Tq_e_ref.push_back(ref.Tq_e_ref);
      r.p_im_ref.push_back(ref.p_im_ref);
      r.p_ic_ref.push_back(ref.p_ic_ref);
      r.gear.push_back(ref.gear);
      r.actuators.push_back({cmd.A_th, cmd.u_wg, cmd.omega_e_ref, cmd.lambda, cmd.p_amb, cmd.T_amb});
      r.sensors.push_back(y);
      r.states.push_back(state.to_vector());
      std::array<double, kFaultCount> act{};
      if (schedule.profile) act[fault_col] = activation(t, *schedule.profile, r.T_DC);
      r.fault_activation.push_back(act);
      r.Tq_e.push_back(alg.Tq_e);
      r.controller.push_back(sig);
    }

    try {
      state = rk4_step(state, cmd, faults, params, config.dt, t);
    } catch (const ModelBlowup& e) {
      throw SimulationAborted(e, result);
    }
  }
  return std::move(r);
}

std::vector<std::string> run_csv_columns() {
  std::vector<std::string> c = {"time_s", "omega_eREF", "Tq_eREF", "p_imREF", "p_icREF", "gear"};
  for (auto n : kActuatorNames) c.emplace_back(n);
  for (auto n : kSensorNames) c.emplace_back(n);
  for (auto n : kStateNames) c.emplace_back(n);
  for (auto n : kFaultNames) c.emplace_back(n);
  for (const char* n : {"Tq_e", "e_im", "e_ic", "A_thREF", "alpha_thFF", "alpha_thFB",
                        "alpha_th", "u_wgFB", "alpha_sat", "u_wg_sat"}) {
    c.emplace_back(n);
  }
  return c;
}

namespace {

void write_row(std::ostream& out, std::initializer_list<double> values, bool first = false) {
  for (double v : values) {
    if (!first) out << ',';
    out << format_double(v);
    first = false;
  }
}

template <class Range>
void write_range(std::ostream& out, const Range& values) {
  for (double v : values) out << ',' << format_double(v);
}

}  // namespace

void write_run_csv(std::ostream& out, const SimResult& r) {
  const auto cols = run_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (std::size_t i = 0; i < r.rows(); ++i) {
    write_row(out, {r.time[i], r.omega_e_ref[i], r.Tq_e_ref[i], r.p_im_ref[i], r.p_ic_ref[i],
                    static_cast<double>(r.gear[i])},
              true);
    write_range(out, r.actuators[i]);
    write_range(out, r.sensors[i]);
    write_range(out, r.states[i]);
    write_range(out, r.fault_activation[i]);
    const ControllerSignals& s = r.controller[i];
    write_row(out, {r.Tq_e[i], s.e_im, s.e_ic, s.A_th_ref, s.alpha_ff, s.alpha_fb, s.alpha,
                    s.u_wg_fb, s.alpha_saturated ? 1.0 : 0.0, s.u_wg_saturated ? 1.0 : 0.0});
    out << '\n';
  }
}

void write_torque_csv(std::ostream& out, const SimResult& r) {
  out << "time_s,Tq_eREF,Tq_e\n";
  for (std::size_t i = 0; i < r.rows(); ++i) {
    write_row(out, {r.time[i], r.Tq_e_ref[i], r.Tq_e[i]}, true);
    out << '\n';
  }
}

void write_fault_signal_csv(std::ostream& out, const SimResult& r) {
  out << "time_s,fault_signal\n";
  for (std::size_t i = 0; i < r.rows(); ++i) {
    double v = 0.0;
    for (double a : r.fault_activation[i]) v = std::max(v, a);
    write_row(out, {r.time[i], v}, true);
    out << '\n';
  }
}

bool is_idle_row(const SimResult& r, std::size_t i) { return !(r.Tq_e_ref[i] > 0.0); }

double torque_tracking_ratio(const SimResult& r) {
  double err2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    if (is_idle_row(r, i)) continue;
    const double e = r.Tq_e[i] - r.Tq_e_ref[i];
    err2 += e * e;
    ref2 += r.Tq_e_ref[i] * r.Tq_e_ref[i];
  }
  if (ref2 <= 0.0) return 0.0;
  return std::sqrt(err2 / ref2);
}

}  // namespace tcsi
