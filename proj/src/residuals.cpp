#include "tcsi/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcsi/keyvalue.hpp"

namespace tcsi {

std::size_t residual_index(std::string_view name) {
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    if (kResidualNames[i] == name) return i;
  }
  throw ConfigError("unknown residual '" + std::string(name) + "'");
}

void ResidualSeries::validate() const {
  if (values.size() != time.size()) throw InvalidParameter("residual series length mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (double v : values[i]) {
      if (!std::isfinite(v)) {
        throw InvalidParameter("non-finite residual at t=" + format_double(time[i]));
      }
    }
  }
}

ResidualSeries raw_residuals(const SimResult& run, const EngineParams& params) {
  ResidualSeries out;
  out.time = run.time;
  out.values.resize(run.rows());
  if (run.rows() == 0) return out;

  const std::size_t last_step = run.trace_index_of_row(run.rows() - 1);
  if (last_step >= run.trace_A_th.size()) {
    throw InvalidParameter("actuator trace shorter than the logged rows");
  }
  const FaultSignals none;
  EngineState x = run.initial_state;
  std::size_t row = 0;
  for (std::size_t step = 0; step <= last_step; ++step) {
    const double t = (static_cast<double>(step) - static_cast<double>(run.warmup_steps)) * run.dt;
    const ActuatorCommand cmd = run.command_at(step);
    if (step == run.trace_index_of_row(row)) {
      const SensorReading y_hat = sensor_outputs(x, eval_algebraic(x, cmd, none, params), none);
      const auto est = y_hat.to_array();
      for (std::size_t i = 0; i < kResidualCount; ++i) {
        out.values[row][i] = est[i] - run.sensors[row][i];
      }
      if (++row == run.rows()) break;
    }
    x = rk4_step(x, cmd, none, params, run.dt, t);
  }
  return out;
}

ResidualSeries low_pass(const ResidualSeries& series, double tau) {
  if (!(tau > 0.0)) throw InvalidParameter("filter time constant must be positive");
  ResidualSeries out = series;
  for (std::size_t k = 1; k < out.rows(); ++k) {
    const double h = out.time[k] - out.time[k - 1];
    const double a = 1.0 - std::exp(-h / tau);
    for (std::size_t i = 0; i < kResidualCount; ++i) {
      out.values[k][i] = out.values[k - 1][i] + a * (series.values[k][i] - out.values[k - 1][i]);
    }
  }
  return out;
}

ResidualSeries generate_residuals(const SimResult& run, const EngineParams& params,
                                  double filter_tau) {
  return low_pass(raw_residuals(run, params), filter_tau);
}

void ResidualCalibration::validate() const {
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    if (!std::isfinite(mean[i])) {
      throw CalibrationError("non-finite mean for " + std::string(kResidualNames[i]));
    }
    if (!(stddev[i] > 0.0) || !std::isfinite(stddev[i])) {
      throw CalibrationError("zero or invalid standard deviation for " +
                             std::string(kResidualNames[i]) + " (degenerate sensor)");
    }
  }
}

ResidualCalibration calibrate(const ResidualSeries& series, std::string source) {
  const std::size_t n = series.rows();
  if (n < 2) throw CalibrationError("calibration needs at least two samples");
  ResidualCalibration cal;
  cal.source = std::move(source);
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    double sum = 0.0;
    for (const auto& v : series.values) sum += v[i];
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& v : series.values) ss += (v[i] - mu) * (v[i] - mu);
    cal.mean[i] = mu;
    cal.stddev[i] = std::sqrt(ss / static_cast<double>(n - 1));
    // Rounding noise on a constant channel is not variance.
    if (cal.stddev[i] <= 1e-12 * std::max(1.0, std::abs(mu))) cal.stddev[i] = 0.0;
  }
  cal.validate();
  return cal;
}

ResidualSeries normalize(const ResidualSeries& series, const ResidualCalibration& cal) {
  cal.validate();
  ResidualSeries out = series;
  for (auto& v : out.values) {
    for (std::size_t i = 0; i < kResidualCount; ++i) v[i] = (v[i] - cal.mean[i]) / cal.stddev[i];
  }
  return out;
}

void write_calibration_csv(std::ostream& out, const ResidualCalibration& cal) {
  out << "# source: " << cal.source << '\n';
  out << "residual,mean,stddev\n";
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    out << kResidualNames[i] << ',' << format_double(cal.mean[i]) << ','
        << format_double(cal.stddev[i]) << '\n';
  }
}

ResidualCalibration parse_calibration_csv(std::string_view text, std::string_view origin) {
  ResidualCalibration cal;
  std::array<bool, kResidualCount> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  const std::string where(origin);
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.rfind("# source:", 0) == 0) {
      cal.source = trim(s.substr(9));
      continue;
    }
    if (s[0] == '#' || s.rfind("residual,", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (fields.size() != 3) {
      throw CalibrationError(where + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    std::size_t idx = 0;
    try {
      idx = residual_index(fields[0]);
    } catch (const ConfigError& e) {
      throw CalibrationError(where + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (seen[idx]) throw CalibrationError(where + ": duplicate entry for " + fields[0]);
    seen[idx] = true;
    try {
      cal.mean[idx] = parse_double(fields[1], "mean");
      cal.stddev[idx] = parse_double(fields[2], "stddev");
    } catch (const ConfigError& e) {
      throw CalibrationError(where + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    if (!seen[i]) throw CalibrationError(where + ": missing " + std::string(kResidualNames[i]));
  }
  cal.validate();
  return cal;
}

ResidualCalibration load_calibration(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const ConfigError& e) {
    throw CalibrationError(e.what());
  }
  return parse_calibration_csv(text, path.string());
}

void write_residual_csv(std::ostream& out, const ResidualSeries& series) {
  out << "time_s";
  for (auto n : kResidualNames) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < series.rows(); ++k) {
    out << format_double(series.time[k]);
    for (double v : series.values[k]) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<DetectionEvent> detect(const ResidualSeries& series, double J, double t_f) {
  if (!(J > 0.0)) throw InvalidParameter("threshold J must be positive");
  if (!(t_f > 0.0)) throw InvalidParameter("detection time t_f must be positive");
  std::vector<DetectionEvent> events;
  const std::size_t n = series.rows();
  if (n == 0) return events;
  const double h_last = n > 1 ? series.time[n - 1] - series.time[n - 2] : 0.0;
  for (std::size_t i = 0; i < kResidualCount; ++i) {
    std::size_t k = 0;
    while (k < n) {
      if (!(std::abs(series.values[k][i]) > J)) {
        ++k;
        continue;
      }
      const std::size_t begin = k;
      double peak = 0.0;
      while (k < n && std::abs(series.values[k][i]) > J) {
        peak = std::max(peak, std::abs(series.values[k][i]));
        ++k;
      }
      const double stop = k < n ? series.time[k] : series.time[n - 1] + h_last;
      const double duration = stop - series.time[begin];
      if (duration > t_f) events.push_back({i, series.time[begin], duration, peak});
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const DetectionEvent& a, const DetectionEvent& b) { return a.start < b.start; });
  return events;
}

bool overlaps_any(const DetectionEvent& event, const std::vector<Window>& windows) {
  for (const auto& [a, b] : windows) {
    if (event.start <= b && event.end() >= a) return true;
  }
  return false;
}

std::vector<std::string> residual_labels() {
  return {kResidualNames.begin(), kResidualNames.end()};
}

std::vector<std::string> fault_labels() { return {kFaultNames.begin(), kFaultNames.end()}; }

BoolMatrix make_fsm() { return BoolMatrix(residual_labels(), fault_labels()); }

BoolMatrix reference_fsm() {
  // Rows r_Tc..r_pem, columns f_paf..f_yWaf.
  static constexpr const char* kRows[kResidualCount] = {
      "11010000000", "11111100000", "01010000010", "11111101000", "01010100000",
      "11111100100", "11111110001", "11111100000", "11010000000"};
  BoolMatrix m = make_fsm();
  for (std::size_t r = 0; r < kResidualCount; ++r) {
    for (std::size_t c = 0; c < kFaultCount; ++c) m.set(r, c, kRows[r][c] == '1');
  }
  return m;
}

FimResult fim_from_fsm(const BoolMatrix& fsm) {
  const std::size_t n = fsm.cols();
  FimResult out{BoolMatrix(fsm.col_labels(), fsm.col_labels()), {}};
  for (std::size_t i = 0; i < n; ++i) {
    if (fsm.column_empty(i)) out.undetectable.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      bool subset = true;
      for (std::size_t r = 0; r < fsm.rows() && subset; ++r) {
        if (fsm.at(r, i) && !fsm.at(r, j)) subset = false;
      }
      out.fim.set(i, j, i == j || subset);
    }
  }
  return out;
}

BoolMatrix build_fsm(const std::vector<FaultRunOutcome>& outcomes) {
  std::array<const FaultRunOutcome*, kFaultCount> by_fault{};
  for (const auto& o : outcomes) {
    const std::size_t c = fault_index(o.fault);
    if (by_fault[c]) {
      throw CampaignError("duplicate run for fault " + std::string(fault_name(o.fault)));
    }
    by_fault[c] = &o;
  }
  BoolMatrix fsm = make_fsm();
  for (std::size_t c = 0; c < kFaultCount; ++c) {
    if (!by_fault[c]) {
      throw CampaignError("missing run for fault " + std::string(kFaultNames[c]));
    }
    for (const auto& e : by_fault[c]->events) {
      if (overlaps_any(e, by_fault[c]->windows)) fsm.set(e.residual, c, true);
    }
  }
  return fsm;
}

std::vector<MatrixDiff> compare(const BoolMatrix& expected, const BoolMatrix& actual) {
  if (expected.rows() != actual.rows() || expected.cols() != actual.cols()) {
    throw InvalidParameter("matrix shapes differ");
  }
  std::vector<MatrixDiff> diffs;
  for (std::size_t r = 0; r < expected.rows(); ++r) {
    for (std::size_t c = 0; c < expected.cols(); ++c) {
      if (expected.at(r, c) != actual.at(r, c)) diffs.push_back({r, c, expected.at(r, c), actual.at(r, c)});
    }
  }
  return diffs;
}

}  // namespace tcsi
