#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coilsim/circuit.hpp"
#include "coilsim/dynamics.hpp"
#include "coilsim/inductance.hpp"
#include "coilsim/sweep.hpp"
#include "coilsim/winding.hpp"

namespace coilsim {

using json = nlohmann::json;

struct SweepSpec {
  enum class Variable { Displacement, PulseGrid };
  Variable variable = Variable::Displacement;
  DisplacementGrid displacement;
  std::string pulse_template;
  std::vector<std::vector<int>> grids;
  Objective objective = Objective::Velocity;
  std::size_t budget = 100000;
  bool refine = false;
};

/// One run = one config file. Keys use engineering units (mm, ms, uH, g);
/// values convert to SI at parse time. Unknown keys are rejected so a typo
/// cannot silently change a run.
struct RunConfig {
  WindingProfile profile;
  std::optional<CoilElectrical> electrical_override;  // wins for the circuit
  WireSpec wire;
  TubeSpec tube;
  Capacitor capacitor;
  Projectile projectile;
  std::string schedule_text;
  PulseSchedule schedule;
  double x0 = 0.0;  // [m]
  SolverOptions solver;
  std::optional<SweepSpec> sweep;
};

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      fail(ErrorCode::Config, "config: unknown key '" + it.key() + "' in " + context);
  }
}

inline double require_number(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key))
    fail(ErrorCode::Config, "config: missing field '" + std::string(key) + "' in " + context);
  if (!j.at(key).is_number())
    fail(ErrorCode::Config, "config: field '" + std::string(key) + "' in " + context +
                                " must be a number");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const char* key, double fallback,
                        const std::string& context) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    fail(ErrorCode::Config, "config: field '" + std::string(key) + "' in " + context +
                                " must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline WindingProfile profile_from_json(const json& j) {
  detail::check_keys(j, {"name", "sections"}, "profile");
  if (!j.contains("name") || !j.at("name").is_string())
    fail(ErrorCode::Config, "config: profile needs a string 'name'");
  if (!j.contains("sections") || !j.at("sections").is_array())
    fail(ErrorCode::Config, "config: profile needs a 'sections' array");
  WindingProfile p;
  p.name = j.at("name").get<std::string>();
  for (const auto& s : j.at("sections")) {
    detail::check_keys(s, {"length_mm", "layers"}, "profile section");
    const double length_mm = detail::require_number(s, "length_mm", "profile section");
    if (!s.contains("layers") || !s.at("layers").is_number_integer())
      fail(ErrorCode::Config, "config: profile section needs integer 'layers'");
    p.sections.push_back({from_mm(length_mm), s.at("layers").get<int>()});
  }
  return p;
}

inline json profile_to_json(const WindingProfile& p) {
  json sections = json::array();
  for (const auto& s : p.sections)
    sections.push_back({{"length_mm", to_mm(s.axial_extent)}, {"layers", s.layer_count}});
  return json{{"name", p.name}, {"sections", sections}};
}

inline void save_profile(const std::filesystem::path& path, const WindingProfile& p) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Config, "cannot write profile file " + path.string());
  out << profile_to_json(p).dump(2) << '\n';
}

inline WindingProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open profile file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, "profile file " + path.string() + ": " + e.what());
  }
  return profile_from_json(j);
}

inline Projectile projectile_from_json(const json& j) {
  detail::check_keys(j, {"mass_g", "half_length_mm", "friction_N", "model"}, "projectile");
  if (!j.contains("model"))
    fail(ErrorCode::Config, "config: missing field 'model' in projectile");
  const json& m = j.at("model");
  detail::check_keys(m,
                     {"type", "moment_A_m2", "coupling_A_m2_per_T", "saturation_A_m2"},
                     "projectile model");
  if (!m.contains("type") || !m.at("type").is_string())
    fail(ErrorCode::Config, "config: projectile model needs a string 'type'");
  const std::string type = m.at("type").get<std::string>();

  Projectile p;
  if (type == "n52") p = n52_projectile();
  else if (type == "ferrite") p = ferrite_projectile();
  else if (type == "permanent") {
    p.model = PermanentDipole{detail::require_number(m, "moment_A_m2", "projectile model")};
  } else if (type == "induced") {
    p.model = InducedDipole{
        detail::require_number(m, "coupling_A_m2_per_T", "projectile model"),
        detail::require_number(m, "saturation_A_m2", "projectile model")};
  } else {
    fail(ErrorCode::Config, "config: unknown projectile model type '" + type + "'");
  }
  if (type == "permanent" || type == "induced") {
    p.mass = from_grams(detail::require_number(j, "mass_g", "projectile"));
    p.half_length = from_mm(detail::require_number(j, "half_length_mm", "projectile"));
  } else {
    p.mass = from_grams(detail::number_or(j, "mass_g", to_grams(p.mass), "projectile"));
    p.half_length =
        from_mm(detail::number_or(j, "half_length_mm", to_mm(p.half_length), "projectile"));
    if (type == "n52" && j.contains("mass_g"))
      p.model = PermanentDipole{ndfeb_moment_from_mass(p.mass)};
  }
  p.friction = detail::number_or(j, "friction_N", 0.0, "projectile");
  p.validate();
  return p;
}

inline json projectile_to_json(const Projectile& p) {
  json model;
  if (const auto* perm = std::get_if<PermanentDipole>(&p.model))
    model = {{"type", "permanent"}, {"moment_A_m2", perm->moment}};
  else {
    const auto& ind = std::get<InducedDipole>(p.model);
    model = {{"type", "induced"},
             {"coupling_A_m2_per_T", ind.coupling},
             {"saturation_A_m2", ind.saturation_moment}};
  }
  json j{{"mass_g", to_grams(p.mass)},
         {"half_length_mm", to_mm(p.half_length)},
         {"model", model}};
  if (p.friction != 0.0) j["friction_N"] = p.friction;
  return j;
}

inline SweepSpec sweep_from_json(const json& j) {
  detail::check_keys(j,
                     {"variable", "min_mm", "max_mm", "step_mm", "objective", "template",
                      "grids", "budget", "refine"},
                     "sweep");
  SweepSpec spec;
  if (!j.contains("variable") || !j.at("variable").is_string())
    fail(ErrorCode::Config, "config: sweep needs a string 'variable'");
  const std::string variable = j.at("variable").get<std::string>();
  if (j.contains("objective"))
    spec.objective = objective_from_name(j.at("objective").get<std::string>());
  if (variable == "displacement") {
    spec.variable = SweepSpec::Variable::Displacement;
    spec.displacement.min_mm = detail::require_number(j, "min_mm", "sweep");
    spec.displacement.max_mm = detail::require_number(j, "max_mm", "sweep");
    spec.displacement.step_mm = detail::require_number(j, "step_mm", "sweep");
    spec.displacement.validate();
  } else if (variable == "pulse_grid") {
    spec.variable = SweepSpec::Variable::PulseGrid;
    if (!j.contains("template") || !j.at("template").is_string())
      fail(ErrorCode::Config, "config: pulse_grid sweep needs a string 'template'");
    spec.pulse_template = j.at("template").get<std::string>();
    if (!j.contains("grids") || !j.at("grids").is_array())
      fail(ErrorCode::Config, "config: pulse_grid sweep needs a 'grids' array");
    for (const auto& g : j.at("grids")) {
      if (!g.is_array() || g.empty())
        fail(ErrorCode::Config, "config: each pulse grid must be a non-empty array");
      std::vector<int> grid;
      for (const auto& v : g) {
        if (!v.is_number_integer())
          fail(ErrorCode::Config, "config: pulse grids hold integer milliseconds");
        grid.push_back(v.get<int>());
      }
      spec.grids.push_back(std::move(grid));
    }
    if (j.contains("budget")) spec.budget = j.at("budget").get<std::size_t>();
    if (j.contains("refine")) spec.refine = j.at("refine").get<bool>();
  } else {
    fail(ErrorCode::Config, "config: unknown sweep variable '" + variable + "'");
  }
  return spec;
}

inline json sweep_to_json(const SweepSpec& spec) {
  json j;
  if (spec.variable == SweepSpec::Variable::Displacement) {
    j = {{"variable", "displacement"},
         {"min_mm", spec.displacement.min_mm},
         {"max_mm", spec.displacement.max_mm},
         {"step_mm", spec.displacement.step_mm}};
  } else {
    json grids = json::array();
    for (const auto& g : spec.grids) grids.push_back(g);
    j = {{"variable", "pulse_grid"},
         {"template", spec.pulse_template},
         {"grids", grids},
         {"budget", spec.budget},
         {"refine", spec.refine}};
  }
  j["objective"] = objective_name(spec.objective);
  return j;
}

inline RunConfig config_from_json(const json& root) {
  if (!root.is_object()) fail(ErrorCode::Config, "config: top level must be an object");
  detail::check_keys(root,
                     {"coil", "wire", "tube", "capacitor", "projectile", "schedule",
                      "x0_mm", "solver", "sweep"},
                     "config");

  std::vector<std::string> missing;
  for (const char* key : {"coil", "projectile", "schedule"})
    if (!root.contains(key)) missing.emplace_back(key);
  if (!missing.empty()) {
    std::string msg = "config: missing required field(s):";
    for (const auto& k : missing) msg += " " + k;
    fail(ErrorCode::Config, msg);
  }

  RunConfig cfg;

  const json& coil = root.at("coil");
  detail::check_keys(coil, {"preset", "profile", "electrical_override"}, "coil");
  if (coil.contains("preset") && coil.contains("profile"))
    fail(ErrorCode::Config, "config: coil takes either 'preset' or 'profile', not both");
  if (coil.contains("preset"))
    cfg.profile = preset(coil.at("preset").get<std::string>());
  else if (coil.contains("profile"))
    cfg.profile = profile_from_json(coil.at("profile"));
  else
    fail(ErrorCode::Config, "config: coil needs 'preset' or 'profile'");
  if (coil.contains("electrical_override")) {
    const json& e = coil.at("electrical_override");
    detail::check_keys(e, {"inductance_uH", "resistance_ohm"}, "electrical_override");
    CoilElectrical ce{from_uH(detail::require_number(e, "inductance_uH", "electrical_override")),
                      detail::require_number(e, "resistance_ohm", "electrical_override")};
    ce.validate();
    cfg.electrical_override = ce;
  }

  if (root.contains("wire")) {
    const json& w = root.at("wire");
    detail::check_keys(w, {"bare_diameter_mm", "pitch_mm", "resistance_per_m_ohm"}, "wire");
    cfg.wire.bare_diameter =
        from_mm(detail::number_or(w, "bare_diameter_mm", to_mm(cfg.wire.bare_diameter), "wire"));
    cfg.wire.pitch = from_mm(detail::number_or(w, "pitch_mm", to_mm(cfg.wire.pitch), "wire"));
    cfg.wire.resistance_per_length =
        detail::number_or(w, "resistance_per_m_ohm", cfg.wire.resistance_per_length, "wire");
  }
  cfg.wire.validate();

  if (root.contains("tube")) {
    const json& t = root.at("tube");
    detail::check_keys(t, {"length_mm", "outer_radius_mm"}, "tube");
    cfg.tube.length = from_mm(detail::number_or(t, "length_mm", to_mm(cfg.tube.length), "tube"));
    cfg.tube.outer_radius =
        from_mm(detail::number_or(t, "outer_radius_mm", to_mm(cfg.tube.outer_radius), "tube"));
  }
  cfg.tube.validate();
  cfg.profile.validate(cfg.tube);

  if (root.contains("capacitor")) {
    const json& c = root.at("capacitor");
    detail::check_keys(c,
                       {"capacitance_F", "initial_voltage_V", "series_resistance_ohm",
                        "flyback_diode_drop_V"},
                       "capacitor");
    cfg.capacitor.capacitance =
        detail::number_or(c, "capacitance_F", cfg.capacitor.capacitance, "capacitor");
    cfg.capacitor.v = detail::number_or(c, "initial_voltage_V", cfg.capacitor.v, "capacitor");
    cfg.capacitor.series_resistance =
        detail::number_or(c, "series_resistance_ohm", 0.0, "capacitor");
    cfg.capacitor.flyback_diode_drop =
        detail::number_or(c, "flyback_diode_drop_V", 0.0, "capacitor");
  }
  cfg.capacitor.validate();

  cfg.projectile = projectile_from_json(root.at("projectile"));

  if (!root.at("schedule").is_string())
    fail(ErrorCode::Config, "config: 'schedule' must be a pulse string such as \"F5 B5 R4\"");
  cfg.schedule = parse_schedule(root.at("schedule").get<std::string>());
  cfg.schedule_text = format_schedule(cfg.schedule);

  cfg.x0 = from_mm(detail::number_or(root, "x0_mm", 0.0, "config"));

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    detail::check_keys(s, {"dt_internal_us", "log_cadence_ms"}, "solver");
    cfg.solver.dt_internal =
        from_us(detail::number_or(s, "dt_internal_us", to_us(cfg.solver.dt_internal), "solver"));
    cfg.solver.log_cadence =
        from_ms(detail::number_or(s, "log_cadence_ms", to_ms(cfg.solver.log_cadence), "solver"));
  }
  cfg.solver.validate();

  if (root.contains("sweep")) cfg.sweep = sweep_from_json(root.at("sweep"));
  return cfg;
}

inline json config_to_json(const RunConfig& cfg) {
  json coil{{"profile", profile_to_json(cfg.profile)}};
  if (cfg.electrical_override)
    coil["electrical_override"] = {
        {"inductance_uH", to_uH(cfg.electrical_override->inductance)},
        {"resistance_ohm", cfg.electrical_override->resistance}};
  json j{{"coil", coil},
         {"wire",
          {{"bare_diameter_mm", to_mm(cfg.wire.bare_diameter)},
           {"pitch_mm", to_mm(cfg.wire.pitch)},
           {"resistance_per_m_ohm", cfg.wire.resistance_per_length}}},
         {"tube",
          {{"length_mm", to_mm(cfg.tube.length)},
           {"outer_radius_mm", to_mm(cfg.tube.outer_radius)}}},
         {"capacitor",
          {{"capacitance_F", cfg.capacitor.capacitance},
           {"initial_voltage_V", cfg.capacitor.v},
           {"series_resistance_ohm", cfg.capacitor.series_resistance},
           {"flyback_diode_drop_V", cfg.capacitor.flyback_diode_drop}}},
         {"projectile", projectile_to_json(cfg.projectile)},
         {"schedule", cfg.schedule_text},
         {"x0_mm", to_mm(cfg.x0)},
         {"solver",
          {{"dt_internal_us", to_us(cfg.solver.dt_internal)},
           {"log_cadence_ms", to_ms(cfg.solver.log_cadence)}}}};
  if (cfg.sweep) j["sweep"] = sweep_to_json(*cfg.sweep);
  return j;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, "config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

inline void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Config, "cannot write config file " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

/// Lumped values used by the circuit: an explicit override wins, otherwise
/// the estimator runs on the digitized profile.
inline CoilElectrical effective_electrical(const RunConfig& cfg, const LoopStack& stack) {
  if (cfg.electrical_override) return *cfg.electrical_override;
  return estimate_electrical(stack, cfg.wire);
}

}  // namespace coilsim
