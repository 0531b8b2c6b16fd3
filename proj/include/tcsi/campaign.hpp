#pragma once

#include <functional>
#include <optional>

#include "tcsi/residuals.hpp"

namespace tcsi {

struct DiagnosisConfig {
  double J = kDefaultThreshold;
  double t_f = kDefaultDetectionTime;
  double filter_tau = kDefaultFilterTau;

  void validate() const;
};

struct RunDiagnosis {
  ResidualSeries normalized;
  std::vector<DetectionEvent> events;
};

// Residuals, normalization and detection for one run.
RunDiagnosis diagnose_run(const SimResult& run, const EngineParams& params,
                          const ResidualCalibration& cal, const DiagnosisConfig& diag);

// Fault-free run with the base seed, residuals calibrated on it.
struct CalibrationRun {
  SimResult run;
  ResidualSeries residuals;  // filtered, not normalized
  ResidualCalibration calibration;
};

CalibrationRun run_calibration(const SimConfig& base, const EngineParams& params,
                               const DrivingCycle& cycle, const DiagnosisConfig& diag);

// Seed used for the run of fault i in a campaign with base seed s.
std::uint64_t fault_run_seed(std::uint64_t base_seed, FaultId fault);

struct CampaignOptions {
  SimConfig base;
  DiagnosisConfig diagnosis;
  unsigned threads = 0;  // 0 = hardware concurrency
  // Reuse a calibration instead of running the fault-free case first.
  std::optional<ResidualCalibration> calibration;
  // Called from worker threads once per finished fault run.
  std::function<void(FaultId, const SimResult&, const RunDiagnosis&)> on_fault_run;
};

struct CampaignResult {
  ResidualCalibration calibration;
  std::optional<CalibrationRun> calibration_run;
  std::vector<FaultRunOutcome> outcomes;  // catalogue order
  BoolMatrix fsm;
  FimResult fim;
};

// Throws CampaignError naming the first failing run.
CampaignResult run_campaign(const CampaignOptions& options, const EngineParams& params,
                            const DrivingCycle& cycle);

}  // namespace tcsi
