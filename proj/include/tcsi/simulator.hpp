#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tcsi/boost_controller.hpp"
#include "tcsi/cycle_reference.hpp"
#include "tcsi/engine_model.hpp"
#include "tcsi/error.hpp"
#include "tcsi/fault_injection.hpp"

namespace tcsi {

struct NoiseConfig {
  bool enabled = true;
  double std_fraction = 0.005;
  // Full scale per sensor, order of kSensorNames.
  std::array<double, kSensorCount> full_scale = {500.0, 250e3, 500.0, 250e3, 500.0,
                                                 250e3, 0.2,   300.0, 300e3};

  double stddev(std::size_t sensor) const { return std_fraction * full_scale[sensor]; }
};

struct SimConfig {
  std::string cycle = "eudc";
  std::optional<FaultId> fault;
  double dt = 1e-3;
  int log_decimation = 10;
  double warmup = 5.0;
  NoiseConfig noise;
  std::uint64_t seed = 1;
  ControllerGains gains;
  GearboxSpec gearbox;
  AmbientConditions ambient;

  void validate() const;
};

// Post-step clamps shared by plant and observer.
EngineState clamp_state(const EngineState& state, const EngineParams& params);

// One RK4 step with command and faults held; throws ModelBlowup.
EngineState rk4_step(const EngineState& state, const ActuatorCommand& cmd,
                     const FaultSignals& faults, const EngineParams& params, double dt,
                     double t);

struct SimResult {
  std::string cycle_name;
  std::string fault_name = "none";
  double T_DC = 0.0;
  double dt = 0.0;
  int log_decimation = 1;
  std::uint64_t seed = 0;
  std::vector<Window> fault_windows;

  // Logged rows; every series shares `time`.
  std::vector<double> time;
  std::vector<double> omega_e_ref, Tq_e_ref, p_im_ref, p_ic_ref;
  std::vector<int> gear;
  std::vector<std::array<double, kActuatorCount>> actuators;
  std::vector<std::array<double, kSensorCount>> sensors;  // as measured
  std::vector<StateVector> states;
  std::vector<std::array<double, kFaultCount>> fault_activation;
  std::vector<double> Tq_e;  // noise-free engine torque
  std::vector<ControllerSignals> controller;

  // Full-rate command trace (warm-up included) for observer replay.
  EngineState initial_state;
  std::size_t warmup_steps = 0;
  std::vector<double> trace_A_th, trace_u_wg, trace_omega_e;
  double lambda = 1.0;
  AmbientConditions ambient;

  std::size_t rows() const { return time.size(); }
  // Plant step index whose start coincides with logged row i.
  std::size_t trace_index_of_row(std::size_t row) const;
  ActuatorCommand command_at(std::size_t step) const;
};

// Thrown when the plant blows up mid-run; carries the log up to that point.
class SimulationAborted : public ModelBlowup {
 public:
  SimulationAborted(const ModelBlowup& cause, std::shared_ptr<const SimResult> partial)
      : ModelBlowup(cause), partial_(std::move(partial)) {}
  const SimResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<const SimResult> partial_;
};

SimResult run_closed_loop(const SimConfig& config, const EngineParams& params);
SimResult run_closed_loop(const SimConfig& config, const EngineParams& params,
                          const DrivingCycle& cycle);

// Column order: time, references, actuators, sensors, states, faults, extras.
std::vector<std::string> run_csv_columns();
void write_run_csv(std::ostream& out, const SimResult& result);
void write_torque_csv(std::ostream& out, const SimResult& result);
void write_fault_signal_csv(std::ostream& out, const SimResult& result);

// A row is idle when there is no torque demand (standstill, coasting or
// braking): the throttle then sits at its stop and torque is not controlled.
bool is_idle_row(const SimResult& result, std::size_t row);
// RMS of (Tq_e - Tq_e_ref) over non-idle rows divided by the RMS of Tq_e_ref
// over the same rows.
double torque_tracking_ratio(const SimResult& result);

}  // namespace tcsi
