#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "tcsi/campaign.hpp"
#include "tcsi/keyvalue.hpp"
#include "tcsi/manifest.hpp"
#include "tcsi/run_config.hpp"
#include "tcsi/structural.hpp"

namespace {

using namespace tcsi;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kBlowup = 3, kCampaign = 4 };

struct Flags {
  std::optional<std::string> config, out, run_dir, cycle, fault, calibration, engine_params;
  std::optional<std::string> seed, dt, threshold, tf, threads, noise;
  std::vector<std::string> sets;
  bool save_runs = false;
  std::string structural_target;
  std::optional<std::string> structural_model;
};

RunConfig resolve(const Flags& flags) {
  RunConfig cfg;
  if (flags.config) apply_config_file(cfg, *flags.config);
  apply_environment(cfg, process_environment());
  const std::pair<const char*, const std::optional<std::string>*> direct[] = {
      {"engine_params", &flags.engine_params}, {"out", &flags.out},
      {"run_dir", &flags.run_dir},             {"cycle", &flags.cycle},
      {"fault", &flags.fault},                 {"calibration", &flags.calibration},
      {"seed", &flags.seed},                   {"dt", &flags.dt},
      {"threshold", &flags.threshold},         {"tf", &flags.tf},
      {"threads", &flags.threads},             {"noise", &flags.noise}};
  for (const auto& [key, value] : direct) {
    if (*value) apply_setting(cfg, key, **value);
  }
  for (const auto& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, trim(s.substr(0, eq)), s.substr(eq + 1));
  }
  if (flags.save_runs) cfg.save_runs = true;
  cfg.validate();
  return cfg;
}

std::string fault_label(const RunConfig& cfg) {
  return cfg.sim.fault ? std::string(fault_name(*cfg.sim.fault)) : "none";
}

fs::path output_dir(const RunConfig& cfg, std::string_view cycle, std::string_view fault) {
  if (cfg.run_dir) {
    fs::create_directories(*cfg.run_dir);
    return *cfg.run_dir;
  }
  return make_results_dir(cfg.out_dir, cycle, fault, iso8601_basic_utc());
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  writer(f);
}

// The resolved config next to the artifacts is what the rerun command loads.
Manifest start_manifest(const RunConfig& cfg, const fs::path& dir, std::string_view subcommand,
                        const std::string& extra_args = {}) {
  const std::string text = format_run_config(cfg);
  write_file(dir / "resolved.cfg", [&](std::ostream& o) { o << text; });
  Manifest m;
  m.command = "tcsi " + std::string(subcommand) + extra_args + " --config " +
              (dir / "resolved.cfg").string() + " --run-dir " + dir.string();
  m.add("subcommand", std::string(subcommand));
  m.add("cycle", cfg.sim.cycle);
  m.add("fault", fault_label(cfg));
  m.add("seed", std::to_string(cfg.sim.seed));
  m.add("dt", format_double(cfg.sim.dt));
  m.add_input("resolved.cfg", git_blob_hash(text));
  m.add_input("engine_params", git_blob_hash(format_engine_params(cfg.params)));
  const fs::path cycle_path = resolve_cycle_path(cfg.sim.cycle);
  m.add_input("cycle " + cycle_path.filename().string(), git_blob_hash_file(cycle_path));
  if (cfg.calibration_file) {
    m.add_input("calibration " + cfg.calibration_file->string(), git_blob_hash_file(*cfg.calibration_file));
  }
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_run_artifacts(const fs::path& dir, const SimResult& r) {
  write_file(dir / "run.csv", [&](std::ostream& o) { write_run_csv(o, r); });
  write_file(dir / "torque.csv", [&](std::ostream& o) { write_torque_csv(o, r); });
  write_file(dir / "fault_signal.csv", [&](std::ostream& o) { write_fault_signal_csv(o, r); });
}

void write_events(std::ostream& out, const std::vector<DetectionEvent>& events) {
  out << "residual,start_s,duration_s,peak\n";
  for (const auto& e : events) {
    out << kResidualNames[e.residual] << ',' << format_double(e.start) << ','
        << format_double(e.duration) << ',' << format_double(e.peak) << '\n';
  }
}

int cmd_simulate(const RunConfig& cfg) {
  const DrivingCycle cycle = load_cycle(cfg.sim.cycle);
  const fs::path dir = output_dir(cfg, cycle.name, fault_label(cfg));
  Manifest m = start_manifest(cfg, dir, "simulate");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SimResult r = run_closed_loop(cfg.sim, cfg.params, cycle);
    write_run_artifacts(dir, r);
    m.add("status", "ok");
    m.add("T_DC_s", format_double(r.T_DC));
    m.add("rows", std::to_string(r.rows()));
    m.add("torque_tracking_ratio", format_double(torque_tracking_ratio(r)));
    m.add("wall_time_s", format_double(seconds_since(t0)));
    m.write(dir / "manifest.txt");
    std::cout << dir.string() << '\n';
    return kOk;
  } catch (const SimulationAborted& e) {
    write_run_artifacts(dir, e.partial());
    m.add("status", "blowup");
    m.add("error", e.what());
    m.add("rows", std::to_string(e.partial().rows()));
    m.write(dir / "manifest.txt");
    throw;
  }
}

int cmd_calibrate(const RunConfig& cfg) {
  const DrivingCycle cycle = load_cycle(cfg.sim.cycle);
  const fs::path dir = output_dir(cfg, cycle.name, "calibration");
  Manifest m = start_manifest(cfg, dir, "calibrate");
  const auto t0 = std::chrono::steady_clock::now();
  const CalibrationRun cal = run_calibration(cfg.sim, cfg.params, cycle, cfg.diagnosis);
  write_file(dir / "calibration.csv", [&](std::ostream& o) { write_calibration_csv(o, cal.calibration); });
  const ResidualSeries normalized = normalize(cal.residuals, cal.calibration);
  write_file(dir / "residuals.csv", [&](std::ostream& o) { write_residual_csv(o, normalized); });
  const auto events = detect(normalized, cfg.diagnosis.J, cfg.diagnosis.t_f);
  write_file(dir / "events.csv", [&](std::ostream& o) { write_events(o, events); });
  m.add("status", "ok");
  m.add("events", std::to_string(events.size()));
  m.add("wall_time_s", format_double(seconds_since(t0)));
  m.write(dir / "manifest.txt");
  std::cout << (dir / "calibration.csv").string() << '\n';
  return kOk;
}

int cmd_diagnose(const RunConfig& cfg) {
  const DrivingCycle cycle = load_cycle(cfg.sim.cycle);
  ResidualCalibration cal;
  if (cfg.calibration_file) {
    cal = load_calibration(*cfg.calibration_file);
  }
  const fs::path dir = output_dir(cfg, cycle.name, fault_label(cfg));
  Manifest m = start_manifest(cfg, dir, "diagnose");
  const auto t0 = std::chrono::steady_clock::now();
  if (!cfg.calibration_file) {
    cal = run_calibration(cfg.sim, cfg.params, cycle, cfg.diagnosis).calibration;
    write_file(dir / "calibration.csv", [&](std::ostream& o) { write_calibration_csv(o, cal); });
  }
  SimConfig sim = cfg.sim;
  // A calibration made here used the base seed; evaluate on fresh noise.
  if (!cfg.calibration_file) {
    sim.seed = sim.fault ? fault_run_seed(cfg.sim.seed, *sim.fault) : cfg.sim.seed + 1;
  }
  const SimResult run = run_closed_loop(sim, cfg.params, cycle);
  const RunDiagnosis diag = diagnose_run(run, cfg.params, cal, cfg.diagnosis);
  write_run_artifacts(dir, run);
  write_file(dir / "residuals.csv", [&](std::ostream& o) { write_residual_csv(o, diag.normalized); });
  write_file(dir / "events.csv", [&](std::ostream& o) { write_events(o, diag.events); });
  std::size_t in_window = 0;
  for (const auto& e : diag.events) in_window += overlaps_any(e, run.fault_windows) ? 1 : 0;
  m.add("status", "ok");
  m.add("simulation_seed", std::to_string(sim.seed));
  m.add("events", std::to_string(diag.events.size()));
  m.add("events_in_fault_window", std::to_string(in_window));
  m.add("wall_time_s", format_double(seconds_since(t0)));
  m.write(dir / "manifest.txt");
  std::cout << dir.string() << '\n';
  return kOk;
}

void write_matrix_pair(const fs::path& dir, const std::string& stem, const BoolMatrix& m) {
  write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_matrix_csv(o, m); });
  write_file(dir / (stem + ".txt"), [&](std::ostream& o) { write_matrix_text(o, m); });
}

int cmd_campaign(const RunConfig& cfg) {
  const DrivingCycle cycle = load_cycle(cfg.sim.cycle);
  CampaignOptions opt;
  opt.base = cfg.sim;
  opt.base.fault.reset();
  opt.diagnosis = cfg.diagnosis;
  opt.threads = cfg.threads;
  if (cfg.calibration_file) opt.calibration = load_calibration(*cfg.calibration_file);

  const fs::path dir = output_dir(cfg, cycle.name, "campaign");
  Manifest m = start_manifest(cfg, dir, "campaign");
  const auto t0 = std::chrono::steady_clock::now();
  opt.on_fault_run = [&](FaultId id, const SimResult& run, const RunDiagnosis& diag) {
    const fs::path sub = dir / "runs" / std::string(fault_name(id));
    fs::create_directories(sub);
    write_file(sub / "events.csv", [&](std::ostream& o) { write_events(o, diag.events); });
    if (cfg.save_runs) {
      write_run_artifacts(sub, run);
      write_file(sub / "residuals.csv", [&](std::ostream& o) { write_residual_csv(o, diag.normalized); });
    }
  };

  const CampaignResult res = run_campaign(opt, cfg.params, cycle);
  write_file(dir / "calibration.csv", [&](std::ostream& o) { write_calibration_csv(o, res.calibration); });
  write_matrix_pair(dir, "fsm", res.fsm);
  write_matrix_pair(dir, "fim", res.fim.fim);

  const BoolMatrix ref = reference_fsm();
  const auto diffs = compare(ref, res.fsm);
  std::ostringstream summary;
  summary << "cycle: " << cycle.name << "\nruns: " << (res.calibration_run ? 12 : 11)
          << "\nthreshold J: " << format_double(cfg.diagnosis.J)
          << "\ndetection time t_f: " << format_double(cfg.diagnosis.t_f) << " s\n\nFSM\n";
  write_matrix_text(summary, res.fsm);
  summary << "\nFIM\n";
  write_matrix_text(summary, res.fim.fim);
  for (auto f : res.fim.undetectable) summary << "undetectable: " << kFaultNames[f] << '\n';
  summary << "\nagreement with reference FSM: " << (ref.rows() * ref.cols() - diffs.size()) << "/"
          << ref.rows() * ref.cols() << '\n';
  for (const auto& d : diffs) {
    summary << "  " << kResidualNames[d.row] << " x " << kFaultNames[d.col] << ": reference "
            << d.expected << ", simulated " << d.actual << '\n';
  }
  write_file(dir / "summary.txt", [&](std::ostream& o) { o << summary.str(); });
  m.add("status", "ok");
  m.add("fsm_agreement", std::to_string(ref.rows() * ref.cols() - diffs.size()) + "/99");
  m.add("wall_time_s", format_double(seconds_since(t0)));
  m.write(dir / "manifest.txt");
  std::cout << summary.str();
  return kOk;
}

int cmd_structural(const Flags& flags, const RunConfig& cfg) {
  StructuralModel model;
  std::string target = flags.structural_target;
  if (flags.structural_model) {
    model = load_structural_model(*flags.structural_model);
    target = fs::path(*flags.structural_model).stem().string();
  } else if (target == "engine") {
    model = build_engine_structural_model();
  } else if (target == "dcmotor") {
    model = build_dc_motor_example();
  } else {
    throw ConfigError("structural target must be 'engine' or 'dcmotor', got '" + target + "'");
  }
  const IsolabilityResult iso = structural_isolability(model);
  const DMDecomposition dm = dm_decompose(model);

  const fs::path dir = cfg.run_dir ? *cfg.run_dir : make_results_dir(cfg.out_dir, "structural", target, iso8601_basic_utc());
  fs::create_directories(dir);
  write_matrix_pair(dir, "fim", iso.fim);
  std::ostringstream model_text;
  write_structural_model(model_text, model);
  write_file(dir / "model.txt", [&](std::ostream& o) { o << model_text.str(); });
  write_file(dir / "dm.txt", [&](std::ostream& o) {
    auto eqs = [&](const char* name, const std::vector<std::size_t>& idx) {
      o << name << ":";
      for (auto e : idx) o << ' ' << model.equations()[e].label;
      o << '\n';
    };
    auto vars = [&](const char* name, const std::vector<std::size_t>& idx) {
      o << name << ":";
      for (auto v : idx) o << ' ' << model.unknowns()[v];
      o << '\n';
    };
    o << "matching size: " << dm.matching.size << '\n';
    eqs("over-determined equations", dm.over_equations);
    vars("over-determined unknowns", dm.over_unknowns);
    eqs("just-determined equations", dm.just_equations);
    vars("just-determined unknowns", dm.just_unknowns);
    eqs("under-determined equations", dm.under_equations);
    vars("under-determined unknowns", dm.under_unknowns);
  });
  Manifest m;
  m.command = "tcsi structural " +
              (flags.structural_model ? "--model " + *flags.structural_model : target) +
              " --run-dir " + dir.string();
  m.add("target", target);
  m.add("equations", std::to_string(model.equations().size()));
  m.add("faults", std::to_string(model.faults().size()));
  m.add_input("model.txt", git_blob_hash(model_text.str()));
  m.write(dir / "manifest.txt");
  write_matrix_text(std::cout, iso.fim);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turbocharged SI engine fault-diagnosis testbed"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;

  auto opt = [&](const char* name, std::optional<std::string>& target, const char* help) {
    app.add_option_function<std::string>(name, [&target](const std::string& v) { target = v; }, help);
  };
  opt("--config", flags.config, "Config file (key = value lines)");
  opt("--out", flags.out, "Results root directory (default Results)");
  opt("--run-dir", flags.run_dir, "Write artifacts to exactly this directory");
  opt("--seed", flags.seed, "Noise seed");
  opt("--dt", flags.dt, "Integration step in seconds");
  opt("--threshold", flags.threshold, "Detection threshold J on normalized residuals");
  opt("--tf", flags.tf, "Minimum time above threshold, seconds");
  opt("--cycle", flags.cycle, "Driving cycle name or CSV path");
  opt("--fault", flags.fault, "Fault name or none");
  opt("--calibration", flags.calibration, "Residual calibration CSV");
  opt("--engine-params", flags.engine_params, "Engine parameter file");
  opt("--threads", flags.threads, "Worker threads for campaigns (0 = all cores)");
  opt("--noise", flags.noise, "Sensor noise on/off");
  app.add_option("--set", flags.sets, "Override any config key, key=value");

  app.add_subcommand("simulate", "Run one closed-loop simulation");
  app.add_subcommand("calibrate", "Fault-free run and residual calibration");
  app.add_subcommand("diagnose", "Simulate, generate residuals and detect events");
  auto* campaign = app.add_subcommand("campaign", "Calibration plus one run per fault; FSM and FIM");
  campaign->add_flag("--save-runs", flags.save_runs, "Keep per-run CSV logs");
  auto* structural = app.add_subcommand("structural", "Structural fault isolability");
  structural->add_option("target", flags.structural_target, "engine or dcmotor");
  structural->add_option_function<std::string>(
      "--model", [&](const std::string& v) { flags.structural_model = v; }, "Incidence file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig cfg = resolve(flags);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "simulate") return cmd_simulate(cfg);
    if (sub == "calibrate") return cmd_calibrate(cfg);
    if (sub == "diagnose") return cmd_diagnose(cfg);
    if (sub == "campaign") return cmd_campaign(cfg);
    return cmd_structural(flags, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ModelBlowup& e) {
    std::cerr << "model blowup: " << e.what() << '\n';
    return kBlowup;
  } catch (const CampaignError& e) {
    std::cerr << "campaign error: " << e.what() << '\n';
    return kCampaign;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << '\n';
    return kCampaign;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
