#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coilsim/config.hpp"
#include "coilsim/csv.hpp"
#include "coilsim/log_ingest.hpp"

namespace coilsim::cli {

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Config, "cannot write " + path.string());
  out << bytes;
}

inline WindingProfile resolve_profile(const std::string& preset_name,
                                      const std::string& profile_path) {
  if (!preset_name.empty() && !profile_path.empty())
    fail(ErrorCode::Usage, "give either --preset or --profile, not both");
  if (!preset_name.empty()) return preset(preset_name);
  if (!profile_path.empty()) return load_profile(profile_path);
  fail(ErrorCode::Usage, "a coil is required: --preset NAME or --profile FILE");
}

/// "a,b,c" or "lo:hi:step" into a duration grid.
inline std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    int lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 || lo > hi)
      fail(ErrorCode::Usage, "bad grid '" + text + "': want lo:hi:step");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        out.push_back(std::stoi(item));
      } catch (const std::exception&) {
        fail(ErrorCode::Usage, "bad grid '" + text + "': want a,b,c or lo:hi:step");
      }
    }
  }
  if (out.empty()) fail(ErrorCode::Usage, "bad grid '" + text + "': empty");
  return out;
}

struct PreparedRun {
  RunConfig cfg;
  LoopStack stack;
  CoilElectrical electrical;
};

inline PreparedRun prepare(const std::string& config_path, const std::string& pulse_override,
                           const std::optional<double>& x0_mm_override) {
  PreparedRun run;
  run.cfg = load_config(config_path);
  if (!pulse_override.empty()) {
    run.cfg.schedule = parse_schedule(pulse_override);
    run.cfg.schedule_text = format_schedule(run.cfg.schedule);
  }
  if (x0_mm_override) run.cfg.x0 = from_mm(*x0_mm_override);
  run.stack = digitize(run.cfg.profile, run.cfg.wire, run.cfg.tube);
  if (run.stack.empty())
    fail(ErrorCode::Geometry, "config: profile digitizes to zero loops");
  run.electrical = effective_electrical(run.cfg, run.stack);
  return run;
}

inline void print_sim_summary(std::ostream& out, const RunConfig& cfg, const SimResult& sim) {
  out << "schedule        " << cfg.schedule_text << "\n"
      << "x0              " << csv::num(to_mm(cfg.x0)) << " mm\n"
      << "exit velocity   " << csv::num(sim.exit_velocity) << " m/s"
      << (sim.stalled ? "  (stalled: never exited)" : "") << "\n"
      << "capacitor       " << csv::num(sim.v_i) << " V -> " << csv::num(sim.v_f) << " V\n"
      << "efficiency      " << csv::num(sim.efficiency * 100.0) << " %\n"
      << "energy          drop " << csv::num(sim.energy.cap_energy_drop) << " J, dissipated "
      << csv::num(sim.energy.dissipated) << " J, kinetic " << csv::num(sim.energy.kinetic_exit)
      << " J\n";
}

}  // namespace detail

/// Entry point behind the `coilsim` binary; tests drive it in-process.
/// Returns the process exit status; error messages carry their category.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"single-stage coilgun field, discharge and launch toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // field
  auto* field_cmd = app.add_subcommand("field", "on-axis B and dB/dx of a coil as CSV");
  std::string field_preset, field_profile, field_out;
  double field_current = 1.0, field_grid_mm = 0.1;
  std::optional<double> field_xmin_mm, field_xmax_mm;
  field_cmd->add_option("--preset", field_preset, "stock winding profile name");
  field_cmd->add_option("--profile", field_profile, "winding profile JSON file");
  field_cmd->add_option("--current", field_current, "drive current [A]")
      ->capture_default_str();
  field_cmd->add_option("--grid-mm", field_grid_mm, "sample spacing [mm]")
      ->capture_default_str();
  field_cmd->add_option("--x-min-mm", field_xmin_mm, "first sample [mm]");
  field_cmd->add_option("--x-max-mm", field_xmax_mm, "last sample [mm]");
  field_cmd->add_option("-o,--out", field_out, "output CSV path (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "launch one projectile through one schedule");
  std::string sim_config, sim_pulse, sim_trace_out, sim_kin_out;
  std::optional<double> sim_x0_mm;
  sim_cmd->add_option("--config", sim_config, "run config JSON")->required();
  sim_cmd->add_option("--pulse", sim_pulse, "override the config's pulse schedule");
  sim_cmd->add_option("--x0-mm", sim_x0_mm, "override the initial displacement [mm]");
  sim_cmd->add_option("--trace-out", sim_trace_out, "write the current trace CSV here");
  sim_cmd->add_option("--kinematics-out", sim_kin_out, "write the kinematics CSV here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "initial-displacement sweep");
  std::string sweep_config, sweep_out, sweep_objective;
  std::optional<double> sweep_min_mm, sweep_max_mm, sweep_step_mm;
  unsigned sweep_workers = 1;
  sweep_cmd->add_option("--config", sweep_config, "run config JSON")->required();
  sweep_cmd->add_option("--min-mm", sweep_min_mm, "grid start [mm]");
  sweep_cmd->add_option("--max-mm", sweep_max_mm, "grid end [mm]");
  sweep_cmd->add_option("--step-mm", sweep_step_mm, "grid step [mm]");
  sweep_cmd->add_option("--objective", sweep_objective, "velocity or efficiency");
  sweep_cmd->add_option("--workers", sweep_workers, "parallel evaluations");
  sweep_cmd->add_option("-o,--out", sweep_out, "output CSV path (default stdout)");

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "pulse-schedule grid search");
  std::string opt_config, opt_template, opt_objective, opt_out;
  std::vector<std::string> opt_grids;
  std::size_t opt_budget = 100000;
  bool opt_refine = false;
  unsigned opt_workers = 1;
  opt_cmd->add_option("--config", opt_config, "run config JSON")->required();
  opt_cmd->add_option("--template", opt_template, "schedule shape, e.g. \"F? B? R?\"");
  opt_cmd->add_option("--grid", opt_grids,
                      "durations per open slot: a,b,c or lo:hi:step (repeat per slot; "
                      "one grid applies to all slots)");
  opt_cmd->add_option("--objective", opt_objective, "velocity or efficiency");
  opt_cmd->add_option("--budget", opt_budget, "largest allowed run count")
      ->capture_default_str();
  opt_cmd->add_flag("--refine", opt_refine, "coordinate-descent pass after the grid");
  opt_cmd->add_option("--workers", opt_workers, "parallel evaluations");
  opt_cmd->add_option("-o,--out", opt_out, "output CSV path (default stdout)");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "analyze a measured current log");
  std::string ingest_path, ingest_amps_out;
  double ingest_resistance = 0.0;
  ingest_cmd->add_option("--log", ingest_path, "CSV with header t_ms,sensor_V")->required();
  ingest_cmd->add_option("--resistance", ingest_resistance, "coil resistance [ohm]")
      ->required();
  ingest_cmd->add_option("--amps-out", ingest_amps_out, "write converted amps CSV here");

  // presets
  auto* presets_cmd = app.add_subcommand("presets", "list the stock winding profiles");
  bool presets_electrical = false;
  presets_cmd->add_flag("--electrical", presets_electrical,
                        "also estimate L and R (slow for thick coils)");

  std::vector<std::string> argv_storage = args;
  std::vector<const char*> argv;
  argv.push_back("coilsim");
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::Usage);
  }

  try {
    if (field_cmd->parsed()) {
      WindingProfile profile = detail::resolve_profile(field_preset, field_profile);
      WireSpec wire;
      TubeSpec tube;
      profile.validate(tube);
      const LoopStack stack = digitize(profile, wire, tube);
      if (stack.empty()) fail(ErrorCode::Geometry, "profile digitizes to zero loops");
      if (!(field_grid_mm > 0.0)) fail(ErrorCode::Usage, "--grid-mm must be > 0");
      const double x_lo = from_mm(field_xmin_mm.value_or(-50.0));
      const double x_hi = from_mm(field_xmax_mm.value_or(to_mm(tube.length) + 50.0));
      if (!(x_hi > x_lo)) fail(ErrorCode::Usage, "--x-max-mm must exceed --x-min-mm");
      std::vector<FieldSample> samples;
      const double step = from_mm(field_grid_mm);
      for (long k = 0;; ++k) {
        const double x = x_lo + static_cast<double>(k) * step;
        if (x > x_hi + 1e-12) break;
        samples.push_back(superpose(stack, field_current, x));
      }
      std::ostringstream csv_text;
      csv::write_field(csv_text, samples);
      if (field_out.empty()) out << csv_text.str();
      else {
        detail::write_file(field_out, csv_text.str());
        out << "wrote " << samples.size() << " samples to " << field_out << "\n";
      }
      return 0;
    }

    if (sim_cmd->parsed()) {
      auto run = detail::prepare(sim_config, sim_pulse, sim_x0_mm);
      const SimResult sim =
          launch(run.stack, run.cfg.tube, run.electrical, run.cfg.capacitor,
                 run.cfg.schedule, run.cfg.projectile, run.cfg.x0, run.cfg.solver);
      detail::print_sim_summary(out, run.cfg, sim);
      if (!sim_trace_out.empty()) {
        std::ostringstream text;
        csv::write_trace(text, sim.trace);
        detail::write_file(sim_trace_out, text.str());
      }
      if (!sim_kin_out.empty()) {
        std::ostringstream text;
        csv::write_kinematics(text, sim.kinematics);
        detail::write_file(sim_kin_out, text.str());
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      auto run = detail::prepare(sweep_config, "", std::nullopt);
      DisplacementGrid grid;
      Objective objective = Objective::Velocity;
      if (run.cfg.sweep && run.cfg.sweep->variable == SweepSpec::Variable::Displacement) {
        grid = run.cfg.sweep->displacement;
        objective = run.cfg.sweep->objective;
      }
      if (sweep_min_mm) grid.min_mm = *sweep_min_mm;
      if (sweep_max_mm) grid.max_mm = *sweep_max_mm;
      if (sweep_step_mm) grid.step_mm = *sweep_step_mm;
      if (!sweep_objective.empty()) objective = objective_from_name(sweep_objective);
      grid.validate();
      const double max_standoff = std::max(0.0, from_mm(grid.max_mm)) + 0.01;
      LaunchContext ctx(run.stack, run.cfg.tube, run.electrical, run.cfg.capacitor,
                        run.cfg.projectile, run.cfg.solver, max_standoff);
      const SweepResult result =
          sweep_displacement(ctx, run.cfg.schedule, grid, sweep_workers);
      if (sweep_out.empty()) out << result.serialize();
      else detail::write_file(sweep_out, result.serialize());
      const auto& best = result.best(objective);
      out << "points          " << result.points.size() << "\n"
          << "objective       " << objective_name(objective) << "\n"
          << "best x0         " << best.input << " mm\n"
          << "best velocity   " << csv::num(best.velocity) << " m/s\n"
          << "best efficiency " << csv::num(best.efficiency * 100.0) << " %\n";
      return 0;
    }

    if (opt_cmd->parsed()) {
      auto run = detail::prepare(opt_config, "", std::nullopt);
      std::string template_text = opt_template;
      std::vector<std::vector<int>> grids;
      Objective objective = Objective::Velocity;
      SearchOptions sopts;
      sopts.budget = opt_budget;
      sopts.coordinate_refine = opt_refine;
      sopts.workers = opt_workers;
      if (run.cfg.sweep && run.cfg.sweep->variable == SweepSpec::Variable::PulseGrid) {
        if (template_text.empty()) template_text = run.cfg.sweep->pulse_template;
        grids = run.cfg.sweep->grids;
        objective = run.cfg.sweep->objective;
        sopts.budget = run.cfg.sweep->budget;
        if (run.cfg.sweep->refine) sopts.coordinate_refine = true;
      }
      if (!opt_grids.empty()) {
        grids.clear();
        for (const auto& g : opt_grids) grids.push_back(detail::parse_grid(g));
      }
      if (!opt_objective.empty()) objective = objective_from_name(opt_objective);
      if (template_text.empty())
        fail(ErrorCode::Usage, "optimize needs --template or a pulse_grid sweep block");
      const PulseTemplate tpl = PulseTemplate::parse(template_text);
      if (grids.empty()) fail(ErrorCode::Usage, "optimize needs at least one --grid");
      if (grids.size() == 1 && tpl.open_slots() > 1)
        grids.assign(static_cast<std::size_t>(tpl.open_slots()), grids.front());
      LaunchContext ctx(run.stack, run.cfg.tube, run.electrical, run.cfg.capacitor,
                        run.cfg.projectile, run.cfg.solver,
                        std::max(0.0, run.cfg.x0) + 0.01);
      const SweepResult result = search_pulses(ctx, run.cfg.x0, tpl, grids, objective, sopts);
      if (opt_out.empty()) out << result.serialize();
      else detail::write_file(opt_out, result.serialize());
      const auto& best = result.best(objective);
      out << "points          " << result.points.size() << "\n"
          << "objective       " << objective_name(objective) << "\n"
          << "best schedule   " << best.input << "\n"
          << "best velocity   " << csv::num(best.velocity) << " m/s\n"
          << "best efficiency " << csv::num(best.efficiency * 100.0) << " %\n";
      return 0;
    }

    if (ingest_cmd->parsed()) {
      const MeasuredLog log = ingest_log_file(ingest_path);
      const LogReport report = analyze_log(log, ingest_resistance);
      out << "rows            " << log.rows.size() << "\n"
          << "peak current    " << csv::num(report.peak_current) << " A\n"
          << "charge          " << csv::num(report.charge) << " C\n"
          << "resistive energy " << csv::num(report.resistive_energy) << " J\n"
          << "pulse bounds    ";
      for (std::size_t i = 0; i < report.segments.size(); ++i) {
        const auto& s = report.segments[i];
        out << (i ? " " : "") << s.kind << '[' << s.t_begin_ms << ',' << s.t_end_ms << ')';
      }
      out << "\n";
      if (!ingest_amps_out.empty()) {
        std::ostringstream text;
        text << "t_ms,i_A\n";
        for (std::size_t i = 0; i < log.rows.size(); ++i)
          text << log.rows[i].t_ms << ',' << csv::num(log.current(i)) << '\n';
        detail::write_file(ingest_amps_out, text.str());
      }
      return 0;
    }

    if (presets_cmd->parsed()) {
      WireSpec wire;
      TubeSpec tube;
      for (const auto& name : preset_names()) {
        const WindingProfile p = preset(name);
        out << name << "\n  sections: ";
        for (std::size_t i = 0; i < p.sections.size(); ++i) {
          const auto& s = p.sections[i];
          out << (i ? " " : "") << csv::num(to_mm(s.axial_extent)) << "mm x"
              << s.layer_count;
        }
        out << "\n  notes: " << p.notes << "\n";
        if (presets_electrical) {
          const LoopStack stack = digitize(p, wire, tube);
          const CoilElectrical e = estimate_electrical(stack, wire);
          out << "  loops: " << stack.size() << ", estimated L: " << csv::num(to_uH(e.inductance))
              << " uH, R: " << csv::num(e.resistance) << " ohm\n";
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error[" << e.category() << "]: " << e.what() << "\n";
    return e.exit_code();
  }
  err << "error[usage]: no subcommand\n";
  return static_cast<int>(ErrorCode::Usage);
}

}  // namespace coilsim::cli
