#include "tcsi/campaign.hpp"

#include <atomic>
#include <exception>
#include <thread>

namespace tcsi {

void DiagnosisConfig::validate() const {
  if (!(J > 0.0)) throw ConfigError("threshold J must be positive");
  if (!(t_f > 0.0)) throw ConfigError("detection time t_f must be positive");
  if (!(filter_tau > 0.0)) throw ConfigError("filter time constant must be positive");
}

RunDiagnosis diagnose_run(const SimResult& run, const EngineParams& params,
                          const ResidualCalibration& cal, const DiagnosisConfig& diag) {
  RunDiagnosis out;
  out.normalized = normalize(generate_residuals(run, params, diag.filter_tau), cal);
  out.events = detect(out.normalized, diag.J, diag.t_f);
  return out;
}

CalibrationRun run_calibration(const SimConfig& base, const EngineParams& params,
                               const DrivingCycle& cycle, const DiagnosisConfig& diag) {
  SimConfig cfg = base;
  cfg.fault.reset();
  CalibrationRun out;
  out.run = run_closed_loop(cfg, params, cycle);
  out.residuals = generate_residuals(out.run, params, diag.filter_tau);
  out.calibration = calibrate(out.residuals, cycle.name + "_none_seed" + std::to_string(cfg.seed));
  return out;
}

std::uint64_t fault_run_seed(std::uint64_t base_seed, FaultId fault) {
  return base_seed + 1 + fault_index(fault);
}

CampaignResult run_campaign(const CampaignOptions& options, const EngineParams& params,
                            const DrivingCycle& cycle) {
  options.base.validate();
  options.diagnosis.validate();
  params.validate();

  CampaignResult result;
  if (options.calibration) {
    result.calibration = *options.calibration;
  } else {
    try {
      result.calibration_run = run_calibration(options.base, params, cycle, options.diagnosis);
    } catch (const std::exception& e) {
      throw CampaignError(std::string("fault-free calibration run failed: ") + e.what());
    }
    result.calibration = result.calibration_run->calibration;
  }
  result.calibration.validate();

  std::vector<FaultRunOutcome> outcomes(kFaultCount);
  std::vector<std::exception_ptr> errors(kFaultCount);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < kFaultCount; i = next++) {
      const FaultId id = kAllFaults[i];
      try {
        SimConfig cfg = options.base;
        cfg.fault = id;
        cfg.seed = fault_run_seed(options.base.seed, id);
        const SimResult run = run_closed_loop(cfg, params, cycle);
        const RunDiagnosis diag = diagnose_run(run, params, result.calibration, options.diagnosis);
        outcomes[i] = {id, diag.events, run.fault_windows};
        if (options.on_fault_run) options.on_fault_run(id, run, diag);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, kFaultCount);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < kFaultCount; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw CampaignError("run " + std::string(kFaultNames[i]) + " failed: " + e.what());
    }
  }
  result.outcomes = std::move(outcomes);
  result.fsm = build_fsm(result.outcomes);
  result.fim = fim_from_fsm(result.fsm);
  return result;
}

}  // namespace tcsi
