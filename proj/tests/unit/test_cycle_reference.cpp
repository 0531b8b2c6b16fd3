#include <doctest.h>

#include <cmath>

#include "tcsi/cycle_reference.hpp"
#include "tcsi/error.hpp"

using namespace tcsi;

namespace {

bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::abs(b);
}

}  // namespace

TEST_CASE("speed per 1000 rpm from the gear ratios") {
  const GearboxSpec g;
  CHECK(rel_close(speed_per_1000rpm(1, g), 8.371540337179434));
  CHECK(rel_close(speed_per_1000rpm(8, g), 65.30547811321253));
  // Huge reduction drives the speed to zero.
  GearboxSpec steep = g;
  steep.final_drive = 1e12;
  CHECK(speed_per_1000rpm(1, steep) < 1e-9);
}

TEST_CASE("gear selection from the shift table") {
  const GearboxSpec g;
  CHECK(gear_select(0.0, g) == 1);
  CHECK(gear_select(10.0, g) == 1);
  CHECK(gear_select(8.070 * 2.8 + 0.1, g) == 2);
  CHECK(gear_select(120.0, g) == 8);
  CHECK(gear_select(250.0, g) == 8);
}

TEST_CASE("downshift waits for the hysteresis band") {
  const GearboxSpec g;
  // 22 km/h in 2nd: 1st would run at 2726 rpm, above 0.9 * 2800.
  CHECK(gear_select(22.0, g, 2) == 2);
  // 20 km/h: 1st at 2478 rpm, inside the band.
  CHECK(gear_select(20.0, g, 2) == 1);
  // Upshifts are immediate.
  CHECK(gear_select(30.0, g, 1) == 2);
}

TEST_CASE("engine speed reference") {
  const GearboxSpec g;
  CHECK(engine_speed_reference(0.0, 3, g) == 0.0);
  CHECK(rel_close(engine_speed_reference(17.47, 8, g), 100.84965349412492));
  CHECK(engine_speed_reference(20.0, 4, g) ==
        doctest::Approx(2.0 * engine_speed_reference(10.0, 4, g)));
}

TEST_CASE("road load fixtures") {
  const GearboxSpec g;
  const RoadLoad f = road_load(27.78, 0.0, g);
  CHECK(rel_close(f.F_drag, 329.12209766160004));
  CHECK(rel_close(f.F_roll, 216.801));
  CHECK(f.F_inertia == 0.0);
  CHECK(engine_torque_reference(0.0, 0.0, 1, g) == 0.0);
}

TEST_CASE("torque reference increases with acceleration") {
  const GearboxSpec g;
  double prev = engine_torque_reference(15.0, -1.0, 3, g);
  for (double a = -0.9; a <= 2.0; a += 0.1) {
    const double tq = engine_torque_reference(15.0, a, 3, g);
    CHECK(tq > prev);
    prev = tq;
  }
}

TEST_CASE("pressure references") {
  const EngineParams p;
  const PressureReferences r = pressure_references(143.0, p);
  CHECK(rel_close(r.bmep, 998328.3321407565));
  const PressureReferences zero = pressure_references(0.0, p);
  CHECK(rel_close(zero.p_im, 16887.5));
  for (double tq : {0.0, 50.0, 143.0, 250.0}) {
    const PressureReferences q = pressure_references(tq, p);
    CHECK(q.p_ic - q.p_im == doctest::Approx(10000.0));
  }
}

TEST_CASE("cycle csv parsing") {
  const DrivingCycle c = parse_cycle_csv("time_s,speed_kmh\n0,0\n1,3.6\n2,7.2\n", "t");
  CHECK(c.time.size() == 3);
  CHECK(c.duration() == 2.0);
  CHECK(c.speed_at(1.5) == doctest::Approx(5.4));
  CHECK(c.speed_at(10.0) == doctest::Approx(7.2));
  CHECK_THROWS_AS(parse_cycle_csv("0,0\n0,1\n", "dup"), ConfigError);
  CHECK_THROWS_AS(parse_cycle_csv("0,0\n1,-3\n", "neg"), ConfigError);
  CHECK_THROWS_AS(parse_cycle_csv("0,0\n1,abc\n", "bad"), ConfigError);
}

TEST_CASE("bundled cycles load with their nominal durations") {
  CHECK(load_cycle("eudc").duration() == 400.0);
  CHECK(load_cycle("nedc").duration() == 1220.0);
  CHECK(load_cycle("synthetic").duration() == 60.0);
  CHECK(load_cycle("wltp").duration() == 1800.0);
  CHECK(load_cycle("ftp75").duration() == 1874.0);
  CHECK_THROWS_AS(load_cycle("no-such-cycle"), ConfigError);
}

TEST_CASE("reference generator holds idle before the cycle") {
  const EngineParams p;
  const GearboxSpec g;
  ReferenceGenerator gen(load_cycle("synthetic"), g, p);
  const ReferencePoint warm = gen.at(-1.0);
  CHECK(warm.Tq_e_ref == 0.0);
  CHECK(warm.omega_e_ref == doctest::Approx(800.0 * 2.0 * 3.141592653589793 / 60.0));
  const ReferencePoint cruise = gen.at(30.0);
  CHECK(cruise.Tq_e_ref > 0.0);
  CHECK(cruise.p_ic_ref - cruise.p_im_ref == doctest::Approx(p.dp_th_ref));
}
