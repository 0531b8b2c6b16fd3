#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tcsi/bool_matrix.hpp"
#include "tcsi/simulator.hpp"

namespace tcsi {

inline constexpr std::size_t kResidualCount = kSensorCount;
inline constexpr std::array<std::string_view, kResidualCount> kResidualNames = {
    "r_Tc", "r_pc", "r_Tic", "r_pic", "r_Tim", "r_pim", "r_Waf", "r_Tqe", "r_pem"};

std::size_t residual_index(std::string_view name);

struct ResidualSeries {
  std::vector<double> time;
  std::vector<std::array<double, kResidualCount>> values;

  std::size_t rows() const { return time.size(); }
  void validate() const;
};

// r = y_hat - y, with y_hat from an open-loop replay of the fault-free model
// driven by the run's full-rate actuator trace.
ResidualSeries raw_residuals(const SimResult& run, const EngineParams& params);

// First-order low-pass filter, seeded with the first sample.
ResidualSeries low_pass(const ResidualSeries& series, double tau);

inline constexpr double kDefaultFilterTau = 0.5;

// raw_residuals followed by low_pass.
ResidualSeries generate_residuals(const SimResult& run, const EngineParams& params,
                                  double filter_tau = kDefaultFilterTau);

struct ResidualCalibration {
  std::string source;
  std::array<double, kResidualCount> mean{};
  std::array<double, kResidualCount> stddev{};

  void validate() const;
};

// Sample mean and (n-1) standard deviation per channel. Throws
// CalibrationError for a zero-variance channel.
ResidualCalibration calibrate(const ResidualSeries& series, std::string source);
ResidualSeries normalize(const ResidualSeries& series, const ResidualCalibration& cal);

void write_calibration_csv(std::ostream& out, const ResidualCalibration& cal);
ResidualCalibration parse_calibration_csv(std::string_view text, std::string_view origin);
ResidualCalibration load_calibration(const std::filesystem::path& path);
void write_residual_csv(std::ostream& out, const ResidualSeries& series);

struct DetectionEvent {
  std::size_t residual = 0;
  double start = 0.0;
  double duration = 0.0;
  double peak = 0.0;  // max |r| over the event

  double end() const { return start + duration; }
};

inline constexpr double kDefaultThreshold = 5.0;
inline constexpr double kDefaultDetectionTime = 3.0;

// One event per maximal run of samples with |r| > J whose duration exceeds
// t_f. A run's duration counts each sample as one sampling interval.
std::vector<DetectionEvent> detect(const ResidualSeries& normalized,
                                   double J = kDefaultThreshold,
                                   double t_f = kDefaultDetectionTime);

bool overlaps_any(const DetectionEvent& event, const std::vector<Window>& windows);

std::vector<std::string> residual_labels();
std::vector<std::string> fault_labels();

// Residual x fault sensitivity matrix, empty.
BoolMatrix make_fsm();
// The published table for the nine default residuals.
BoolMatrix reference_fsm();

struct FimResult {
  BoolMatrix fim;
  std::vector<std::size_t> undetectable;  // faults with an empty FSM column
};

// (i, j) = 1 iff support(column i) is a subset of support(column j).
FimResult fim_from_fsm(const BoolMatrix& fsm);

struct FaultRunOutcome {
  FaultId fault = FaultId::f_paf;
  std::vector<DetectionEvent> events;
  std::vector<Window> windows;
};

// Needs exactly one outcome per catalogued fault; throws CampaignError otherwise.
BoolMatrix build_fsm(const std::vector<FaultRunOutcome>& outcomes);

struct MatrixDiff {
  std::size_t row = 0, col = 0;
  bool expected = false, actual = false;
};

std::vector<MatrixDiff> compare(const BoolMatrix& expected, const BoolMatrix& actual);

}  // namespace tcsi
