#include <doctest.h>

#include <cmath>

#include "tcsi/boost_controller.hpp"

using namespace tcsi;

namespace {

bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::abs(b);
}

ThrottleReferenceInputs nominal_inputs() {
  ThrottleReferenceInputs in;
  in.p_im_ref = 95e3;
  in.p_ic = 105e3;
  in.p_em = 110e3;
  in.T_im = 293.0;
  in.T_amb = 293.15;
  in.omega_e_ref = 209.0;
  return in;
}

}  // namespace

TEST_CASE("throttle area reference at the nominal point") {
  const EngineParams p;
  const ThrottleReference r = throttle_area_reference(nominal_inputs(), p, 1.0);
  CHECK(rel_close(r.W_ei_ref, 0.026369891350140194));
  CHECK(rel_close(r.Psi_th_ref, 0.38026561317107577));
  CHECK(rel_close(r.A_th_ref, 0.0001916324948875684));
}

TEST_CASE("throttle area reference limits") {
  const EngineParams p;
  ThrottleReferenceInputs in = nominal_inputs();
  in.p_im_ref = 120e3;  // above p_ic
  const ThrottleReference open = throttle_area_reference(in, p, 0.02);
  CHECK(open.Pi_th_ref == 1.0);
  CHECK(open.A_th_ref == 0.02);

  in = nominal_inputs();
  in.omega_e_ref = 0.0;
  const ThrottleReference stopped = throttle_area_reference(in, p, 0.02);
  CHECK(stopped.W_ei_ref == 0.0);
  CHECK(stopped.A_th_ref == 0.0);
}

TEST_CASE("feedforward inverse") {
  const ControllerGains g;
  CHECK(rel_close(throttle_feedforward(g.a0, g), 0.008584310344827588));
  CHECK(rel_close(throttle_feedforward(0.0001916324948875684, g), 0.24734338137645556));
  // At the vertex the sqrt vanishes; the raw value is negative and clamps.
  ControllerGains wide = g;
  wide.alpha_min = -1.0;
  const double vertex_area = g.a0 - g.a2 * (g.a1 / g.a2) * (g.a1 / g.a2);
  CHECK(throttle_feedforward(vertex_area, wide) == doctest::Approx(-0.0020081034482758624));
  CHECK(throttle_feedforward(vertex_area, g) == 0.0);
}

TEST_CASE("feedforward is monotone and inverted by the area map") {
  const ControllerGains g;
  double prev = -1.0;
  for (int k = 0; k <= 50; ++k) {
    const double A = g.a0 + 1e-5 * k;
    const double alpha = throttle_feedforward(A, g);
    CHECK(alpha > prev);
    prev = alpha;
    CHECK(throttle_area_from_position(alpha, g) == doctest::Approx(A).epsilon(1e-12));
  }
}

TEST_CASE("PI at rest") {
  PiState st;
  const PiOutput o = pi_antiwindup_step(0.0, 0.0, 0.5, 2.0, 2.0, -10.0, 10.0, st, 0.1);
  CHECK(o.saturated == 0.0);
  CHECK(st.integrator == 0.0);
}

TEST_CASE("PI integrates a constant error linearly") {
  PiState st;
  const double Kp = 0.5, Ti = 2.0, e = 1.0, dt = 0.1;
  double prev = pi_antiwindup_step(e, 0.0, Kp, Ti, 2.0, -1e9, 1e9, st, dt).saturated;
  for (int k = 0; k < 20; ++k) {
    const double u = pi_antiwindup_step(e, 0.0, Kp, Ti, 2.0, -1e9, 1e9, st, dt).saturated;
    CHECK(u - prev == doctest::Approx(Kp * e / Ti * dt));
    prev = u;
  }
}

TEST_CASE("back-calculation slows the integrator while saturated") {
  // Two steps with e = 4 against an upper bound of 1.
  PiState st;
  const PiOutput o1 = pi_antiwindup_step(4.0, 0.0, 0.5, 2.0, 2.0, 0.0, 1.0, st, 0.1);
  CHECK(o1.raw == doctest::Approx(2.0));
  CHECK(o1.saturated == 1.0);
  CHECK(o1.saturated_flag);
  CHECK(st.integrator == doctest::Approx(0.2));
  const PiOutput o2 = pi_antiwindup_step(4.0, 0.0, 0.5, 2.0, 2.0, 0.0, 1.0, st, 0.1);
  CHECK(o2.raw == doctest::Approx(2.05));
  CHECK(st.integrator == doctest::Approx(0.39));
  // Without back-calculation the integrator would have reached 0.8.
  CHECK(st.integrator < 0.8);
}

TEST_CASE("controller saturates its outputs") {
  const EngineParams p;
  ControllerGains g;
  BoostController c(g, p, 293.15);
  ControllerReferences ref{200e3, 210e3, 300.0};
  ControllerMeasurements meas{50e3, 100e3, 110e3, 300.0};
  for (int k = 0; k < 1000; ++k) {
    const ControllerSignals s = c.step(ref, meas, 1e-3);
    CHECK(s.alpha >= g.alpha_min);
    CHECK(s.alpha <= g.alpha_max);
    CHECK(s.u_wg >= g.u_wg_min);
    CHECK(s.u_wg <= g.u_wg_max);
  }
  CHECK(c.last().alpha == g.alpha_max);
  // Boost below target keeps the wastegate shut.
  CHECK(c.last().u_wg == g.u_wg_min);
}

TEST_CASE("controller gains validation") {
  ControllerGains g;
  g.Ti_th = 0.0;
  CHECK_THROWS(g.validate());
  g = ControllerGains{};
  g.alpha_min = 2.0;
  CHECK_THROWS(g.validate());
}
