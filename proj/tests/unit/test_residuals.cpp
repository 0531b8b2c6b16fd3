#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tcsi/error.hpp"
#include "tcsi/residuals.hpp"

using namespace tcsi;

namespace {

ResidualSeries series_from(const std::vector<double>& channel0, double h = 0.01) {
  ResidualSeries s;
  for (std::size_t k = 0; k < channel0.size(); ++k) {
    s.time.push_back(k * h);
    std::array<double, kResidualCount> v{};
    v[0] = channel0[k];
    s.values.push_back(v);
  }
  return s;
}

ResidualSeries pulse(std::size_t samples_high, double level = 8.0) {
  std::vector<double> v(1000, 0.0);
  for (std::size_t k = 100; k < 100 + samples_high; ++k) v[k] = level;
  return series_from(v);
}

SimResult noiseless_run(const std::string& cycle, std::optional<FaultId> fault) {
  SimConfig c;
  c.cycle = cycle;
  c.fault = fault;
  c.noise.enabled = false;
  return run_closed_loop(c, EngineParams{});
}

}  // namespace

TEST_CASE("fault-free noiseless replay reproduces the plant") {
  const SimResult run = noiseless_run("synthetic", std::nullopt);
  const ResidualSeries r = raw_residuals(run, EngineParams{});
  REQUIRE(r.rows() == run.rows());
  const NoiseConfig scale;
  for (const auto& v : r.values) {
    for (std::size_t i = 0; i < kResidualCount; ++i) {
      CHECK(std::abs(v[i]) < 1e-6 * scale.full_scale[i]);
    }
  }
}

TEST_CASE("temperature sensor offset shows up with opposite sign") {
  const SimResult run = noiseless_run("eudc", FaultId::f_yTic);
  const ResidualSeries r = raw_residuals(run, EngineParams{});
  const std::size_t tic = residual_index("r_Tic");
  bool seen = false;
  for (std::size_t k = 0; k < r.rows(); ++k) {
    const double t = r.time[k];
    const bool active = (t > 150.5 && t < 179.5) || (t > 300.5 && t < 329.5);
    for (std::size_t i = 0; i < kResidualCount; ++i) {
      if (i == tic && active) {
        CHECK(r.values[k][i] == doctest::Approx(-20.0).epsilon(1e-9));
        seen = true;
      } else if (i != tic) {
        CHECK(std::abs(r.values[k][i]) < 1e-6 * NoiseConfig{}.full_scale[i]);
      }
    }
  }
  CHECK(seen);
}

TEST_CASE("intercooler pressure sensor pulses move only their residual") {
  const SimResult run = noiseless_run("eudc", FaultId::f_ypic);
  const ResidualSeries r = raw_residuals(run, EngineParams{});
  const std::size_t pic = residual_index("r_pic");
  double peak = 0.0;
  for (const auto& v : r.values) {
    peak = std::max(peak, std::abs(v[pic]));
    for (std::size_t i = 0; i < kResidualCount; ++i) {
      if (i != pic) CHECK(std::abs(v[i]) < 1e-6 * NoiseConfig{}.full_scale[i]);
    }
  }
  CHECK(peak > 10000.0);
}

TEST_CASE("calibration of a constant channel fails") {
  std::vector<double> c(500, 3.0);
  ResidualSeries s = series_from(c);
  for (auto& v : s.values) v.fill(3.0);
  CHECK_THROWS_AS(calibrate(s, "const"), CalibrationError);
}

TEST_CASE("calibration of standard normal data") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  ResidualSeries s;
  for (int k = 0; k < 10000; ++k) {
    s.time.push_back(k * 0.01);
    std::array<double, kResidualCount> v;
    for (double& x : v) x = n01(rng);
    s.values.push_back(v);
  }
  const ResidualCalibration cal = calibrate(s, "normal");
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    CHECK(std::abs(cal.mean[i]) < 0.05);
    CHECK(cal.stddev[i] == doctest::Approx(1.0).epsilon(0.05));
  }
  // Normalising with its own calibration gives zero mean and unit spread.
  const ResidualCalibration again = calibrate(normalize(s, cal), "again");
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    CHECK(std::abs(again.mean[i]) < 1e-12);
    CHECK(again.stddev[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("calibration csv round trip") {
  ResidualCalibration cal;
  cal.source = "unit";
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    cal.mean[i] = 0.1 * i - 0.3;
    cal.stddev[i] = 1.0 / (i + 3.0);
  }
  std::ostringstream out;
  write_calibration_csv(out, cal);
  const ResidualCalibration back = parse_calibration_csv(out.str(), "mem");
  CHECK(back.source == "unit");
  CHECK(back.mean == cal.mean);
  CHECK(back.stddev == cal.stddev);
  CHECK_THROWS_AS(parse_calibration_csv("residual,mean,stddev\nr_Tc,0,1\n", "short"),
                  CalibrationError);
}

TEST_CASE("detection time rule") {
  CHECK(detect(pulse(250)).empty());
  const auto events = detect(pulse(350));
  REQUIRE(events.size() == 1);
  CHECK(events[0].residual == 0);
  CHECK(events[0].start == doctest::Approx(1.0));
  CHECK(events[0].duration == doctest::Approx(3.5));
  CHECK(events[0].peak == doctest::Approx(8.0));
  CHECK(detect(series_from(std::vector<double>(1000, 0.0))).empty());
  // Negative excursions count as well.
  CHECK(detect(pulse(400, -6.0)).size() == 1);
}

TEST_CASE("raising the threshold never adds events") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 3.0);
  std::vector<double> v(5000);
  double x = 0.0;
  for (double& s : v) s = x = 0.99 * x + n(rng);  // slow random walk
  const ResidualSeries s = series_from(v);
  std::size_t prev = detect(s, 1.0).size();
  double covered_prev = 1e18;
  for (double J = 2.0; J <= 30.0; J += 1.0) {
    const auto ev = detect(s, J);
    double covered = 0.0;
    for (const auto& e : ev) covered += e.duration;
    CHECK(covered <= covered_prev + 1e-9);
    covered_prev = covered;
    prev = ev.size();
  }
  CHECK(prev == 0);
}

TEST_CASE("detection is invariant to a common affine rescaling") {
  const ResidualSeries s = pulse(400, 7.0);
  ResidualSeries scaled = s;
  for (auto& v : scaled.values) v[0] = 3.0 * v[0];
  const auto a = detect(s, 5.0);
  const auto b = detect(scaled, 15.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].start == b[k].start);
    CHECK(a[k].duration == b[k].duration);
  }
}

TEST_CASE("low-pass filter") {
  std::vector<double> step(2000, 1.0);
  step[0] = 0.0;
  const ResidualSeries f = low_pass(series_from(step), 0.5);
  CHECK(f.values[0][0] == 0.0);
  // One time constant after the step.
  CHECK(f.values[50][0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
  CHECK(f.values.back()[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("event overlap with windows") {
  const DetectionEvent e{0, 10.0, 4.0, 6.0};
  CHECK(overlaps_any(e, {{13.0, 20.0}}));
  CHECK(overlaps_any(e, {{0.0, 10.0}}));
  CHECK_FALSE(overlaps_any(e, {{15.0, 20.0}, {0.0, 9.0}}));
  CHECK_FALSE(overlaps_any(e, {}));
}
