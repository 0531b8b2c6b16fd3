#include <doctest.h>

#include <cmath>

#include "tcsi/engine_model.hpp"
#include "tcsi/error.hpp"

using namespace tcsi;

namespace {

bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300);
}

EngineState warm_state() {
  EngineState s;
  s.T_af = 295.0, s.p_af = 100500.0;
  s.T_c = 330.0, s.p_c = 130000.0;
  s.T_ic = 300.0, s.p_ic = 128000.0;
  s.T_im = 305.0, s.p_im = 118000.0;
  s.T_em = 950.0, s.p_em = 140000.0;
  s.T_t = 850.0, s.p_t = 103000.0;
  s.omega_t = 9000.0;
  return s;
}

ActuatorCommand warm_command() {
  ActuatorCommand c;
  c.A_th = 4e-4;
  c.u_wg = 0.3;
  c.omega_e_ref = 250.0;
  return c;
}

}  // namespace

TEST_CASE("restriction flow fixtures") {
  CHECK(restriction_flow(100000, 100000, 293, 2e8, 2000) == 0.0);
  CHECK(rel_close(restriction_flow(102000, 100000, 293, 2e8, 2000), 0.059001937840565705));
  CHECK(rel_close(restriction_flow(100000, 102000, 293, 2e8, 2000), -0.059001937840565705));
  // Linear branch below p_lin.
  CHECK(rel_close(restriction_flow(100500, 100000, 293, 2e8, 2000), 0.014641623308424584));
}

TEST_CASE("restriction flow is continuous at p_lin and odd in the pressure drop") {
  const double below = restriction_flow(102000 - 1e-7, 100000, 293, 2e8, 2000);
  const double above = restriction_flow(102000 + 1e-7, 100000, 293, 2e8, 2000);
  CHECK(std::abs(above - below) < 1e-9);
  for (double dp : {10.0, 500.0, 1999.0, 2500.0, 30000.0}) {
    CHECK(restriction_flow(100000 + dp, 100000, 300, 4e8, 500) ==
          doctest::Approx(-restriction_flow(100000, 100000 + dp, 300, 4e8, 500)));
  }
}

TEST_CASE("restriction flow rejects invalid inputs") {
  CHECK_THROWS_AS(restriction_flow(1e5, 1e5, 0.0, 2e8, 2000), InvalidParameter);
  CHECK_THROWS_AS(restriction_flow(1e5, 1e5, 293, -1.0, 2000), InvalidParameter);
  CHECK_THROWS_AS(restriction_flow(-1.0, 1e5, 293, 2e8, 2000), InvalidParameter);
}

TEST_CASE("critical pressure ratios") {
  CHECK(rel_close(critical_pressure_ratio(2.0), 0.4444444444444444));
  CHECK(rel_close(critical_pressure_ratio(1.3), 0.545727733814065));
}

TEST_CASE("nozzle flow function branches") {
  CHECK(nozzle_flow_function(1.0, 1.3) == 0.0);
  CHECK(nozzle_flow_function(1.2, 1.3) == 0.0);
  CHECK(rel_close(nozzle_flow_function(0.8, 1.3), 0.5555127529243479));
  CHECK(rel_close(nozzle_flow_function(0.3, 1.3), 0.667262351240862));
  CHECK(rel_close(nozzle_flow_function(0.9, 2.0), 0.42981406098236286));
  // Choked branch is flat.
  CHECK(nozzle_flow_function(0.1, 1.3) == nozzle_flow_function(0.5, 1.3));
}

TEST_CASE("nozzle flow function is continuous at the critical ratio") {
  for (double kappa : {1.3, 1.4, 2.0}) {
    const double crit = critical_pressure_ratio(kappa);
    const double choked = nozzle_flow_function(crit * (1.0 - 1e-14), kappa);
    const double open = nozzle_flow_function(crit * (1.0 + 1e-14), kappa);
    CHECK(rel_close(open, choked, 1e-9));
  }
}

TEST_CASE("torque model fixtures") {
  const EngineParams p;
  CHECK(rel_close(torque_model(101300, p), 143.19703887929126));
  CHECK(rel_close(torque_model(1.8e5, p), 276.7034148283535));
  CHECK(torque_model(p.bmep_offset() / p.bmep_slope(), p) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(torque_model(10000.0, p) == 0.0);
}

TEST_CASE("throttle flow edge cases") {
  const EngineParams p;
  CHECK(throttle_flow(120000, 120000, 300, 5e-4, 0.0, 0.0, p) == 0.0);
  CHECK(throttle_flow(120000, 100000, 300, 0.0, 0.003, 0.0, p) == doctest::Approx(0.003));
  // Negative effective area floors at zero.
  CHECK(throttle_flow(120000, 100000, 300, 1e-4, 0.0, -2e-4, p) == 0.0);
  CHECK(throttle_flow(120000, 100000, 300, 2e-4, 0.0, 0.0, p) > 0.0);
}

TEST_CASE("engine flow fixtures") {
  const EngineParams p;
  const EngineFlows stopped = engine_flows(100000, 300, 101000, 0.0, 1.0, 0.0042, 293.15, p);
  CHECK(stopped.W_ei == doctest::Approx(0.0042));

  // A stopped engine passes only the fault term, so W_ei = 0.0151 kg/s.
  const EngineFlows fed = engine_flows(100000, 300, 101000, 0.0, 1.0, 0.0151, 293.15, p);
  CHECK(rel_close(fed.W_f, 0.001));
  CHECK(rel_close(fed.W_eo, 0.0161));

  // Engine flow scales with the mass fraction through the fuel relation.
  const EngineFlows running = engine_flows(100000, 300, 110000, 200.0, 1.0, 0.0, 293.15, p);
  CHECK(running.W_f == doctest::Approx(running.W_ei / p.AF_s));
  CHECK(running.W_eo == doctest::Approx(running.W_ei + running.W_f));
}

TEST_CASE("exhaust temperature at zero flow is T_0") {
  const EngineParams p;
  const EngineFlows f = engine_flows(100000, 300, 101000, 0.0, 1.0, 0.0, 293.15, p);
  CHECK(f.W_eo == 0.0);
  CHECK(f.T_eo == doctest::Approx(p.T_0));
}

TEST_CASE("compressor limits") {
  const EngineParams p;
  EngineState s = warm_state();
  s.p_c = s.p_af;  // unity pressure ratio
  const CompressorOutputs c = compressor(s, p);
  CHECK(c.Pi_c == doctest::Approx(1.0));
  CHECK(c.Psi_c == doctest::Approx(0.0).epsilon(1e-12));

  // Flow forced to zero by the fault term gives zero flow coefficient.
  const CompressorOutputs zero = compressor(s, p, -c.W_c);
  CHECK(zero.W_c == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(zero.Phi_c == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compressor efficiency peaks at Phi_cMAX") {
  const EngineParams p;
  EngineState s = warm_state();
  double best = 0.0;
  // Scan the fault term to sweep Phi_c through its maximum.
  const CompressorOutputs nominal = compressor(s, p);
  for (int k = -200; k <= 400; ++k) {
    const CompressorOutputs c = compressor(s, p, nominal.W_c * k / 100.0);
    best = std::max(best, c.eta_c);
    CHECK(c.eta_c <= p.eta_c_max + 1e-12);
  }
  CHECK(best == doctest::Approx(p.eta_c_max).epsilon(1e-3));
}

TEST_CASE("turbine at unity pressure ratio passes no flow") {
  const EngineParams p;
  EngineState s = warm_state();
  s.p_t = s.p_em;
  const TurbineOutputs t = turbine_wastegate(s, 0.5, p);
  CHECK(t.W_t == 0.0);
  CHECK(t.W_wg == 0.0);
}

TEST_CASE("turbine efficiency peaks at BSR_effMAX") {
  const EngineParams p;
  EngineState s = warm_state();
  double best = 0.0;
  for (int k = 1; k <= 400; ++k) {
    s.omega_t = 100.0 * k;
    const TurbineOutputs t = turbine_wastegate(s, 0.0, p);
    best = std::max(best, t.eta_t);
    CHECK(t.eta_t <= p.eta_t_max + 1e-12);
  }
  CHECK(best == doctest::Approx(p.eta_t_max).epsilon(1e-3));
}

TEST_CASE("equilibrium point has no flows apart from the compressor") {
  const EngineParams p;
  const AmbientConditions amb;
  EngineState s = EngineState::initial(p, amb);
  s.omega_t = p.omega_t_min;
  ActuatorCommand cmd;
  cmd.A_th = 0.0;
  cmd.u_wg = 0.0;
  cmd.omega_e_ref = 0.0;
  const Evaluation ev = eval_derivatives(s, cmd, FaultSignals{}, p);
  CHECK(ev.alg.W_af == 0.0);
  CHECK(ev.alg.W_ic == 0.0);
  CHECK(ev.alg.W_th == 0.0);
  CHECK(ev.alg.W_ei == 0.0);
  CHECK(ev.alg.W_eo == 0.0);
  CHECK(ev.alg.W_wg == 0.0);
  CHECK(ev.alg.W_t == 0.0);
  CHECK(ev.alg.W_exh == 0.0);
  // The intake and exhaust manifolds see no net flow.
  CHECK(ev.derivative[7] == 0.0);
  CHECK(ev.derivative[9] == 0.0);
  CHECK(ev.derivative[11] == 0.0);
}

TEST_CASE("sensor temperature offset does not touch the dynamics") {
  const EngineParams p;
  const EngineState s = warm_state();
  const ActuatorCommand cmd = warm_command();
  FaultSignals f;
  f.f_yTic = 20.0;
  const Evaluation a = eval_derivatives(s, cmd, FaultSignals{}, p);
  const Evaluation b = eval_derivatives(s, cmd, f, p);
  CHECK(a.derivative == b.derivative);
  CHECK(b.y.y_Tic - a.y.y_Tic == doctest::Approx(20.0));
  CHECK(b.y.y_pic == a.y.y_pic);
}

TEST_CASE("air filter pressure rises when inflow exceeds compressor flow") {
  const EngineParams p;
  EngineState s = warm_state();
  s.T_af = s.T_c = s.T_ic = s.T_im = 293.15;
  s.p_af = 99000.0;        // ambient pushes air in
  s.omega_t = 2000.0;      // compressor nearly idle
  s.p_c = 101000.0;
  const Evaluation ev = eval_derivatives(s, warm_command(), FaultSignals{}, p);
  REQUIRE(ev.alg.W_af > ev.alg.W_c);
  CHECK(ev.derivative[1] > 0.0);
}

TEST_CASE("state vector round trip") {
  const EngineState s = warm_state();
  const EngineState r = EngineState::from_vector(s.to_vector());
  CHECK(r.to_vector() == s.to_vector());
  CHECK(kStateNames[12] == "omega_t");
}

TEST_CASE("non-finite state is reported as a blowup") {
  const EngineParams p;
  EngineState s = warm_state();
  s.p_im = std::nan("");
  CHECK_THROWS_AS(eval_derivatives(s, warm_command(), FaultSignals{}, p, 1.5), ModelBlowup);
}

TEST_CASE("flow faults leak mass before the downstream volume") {
  const EngineParams p;
  const EngineState s = warm_state();
  const ActuatorCommand cmd = warm_command();
  const Evaluation a = eval_derivatives(s, cmd, FaultSignals{}, p);
  FaultSignals f;
  f.f_Wc = -0.2 * a.alg.W_c;
  const Evaluation b = eval_derivatives(s, cmd, f, p);
  CHECK(b.alg.W_c == a.alg.W_c);
  CHECK(b.y.y_Waf == a.y.y_Waf);
  // Air filter volume still loses the full compressor flow.
  CHECK(b.derivative[1] == a.derivative[1]);
  CHECK(b.derivative[3] < a.derivative[3]);
}
