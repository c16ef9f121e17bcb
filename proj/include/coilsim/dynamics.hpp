#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>
#include <vector>

#include "coilsim/circuit.hpp"
#include "coilsim/field_table.hpp"
#include "coilsim/magnetostatics.hpp"
#include "coilsim/pulse.hpp"
#include "coilsim/winding.hpp"

namespace coilsim {

/// Fixed magnetic moment (sintered NdFeB slug). The sign sets the
/// orientation: positive means Forward drive pulls the projectile into the
/// coil (attract-first).
struct PermanentDipole {
  double moment = 0.0;  // [A m^2]
};

/// Soft-magnetic payload: moment tracks the local field (and flips with it)
/// up to a saturation ceiling. Both constants are calibration inputs; rod
/// material data does not pin them down.
struct InducedDipole {
  double coupling = 0.0;           // [A m^2 / T]
  double saturation_moment = 0.0;  // [A m^2]
};

struct Projectile {
  double mass = 0.0;         // [kg]
  double half_length = 0.0;  // [m], used for exit bookkeeping
  std::variant<PermanentDipole, InducedDipole> model;
  double friction = 0.0;     // constant opposing force hook [N], default off

  void validate() const {
    if (!(mass > 0.0)) fail(ErrorCode::Config, "projectile: mass must be > 0");
    if (half_length < 0.0) fail(ErrorCode::Config, "projectile: half_length must be >= 0");
    if (friction < 0.0) fail(ErrorCode::Config, "projectile: friction must be >= 0");
    if (const auto* p = std::get_if<PermanentDipole>(&model)) {
      if (p->moment == 0.0) fail(ErrorCode::Config, "projectile: permanent moment must be nonzero");
    } else if (const auto* i = std::get_if<InducedDipole>(&model)) {
      if (!(i->coupling >= 0.0) || !(i->saturation_moment >= 0.0))
        fail(ErrorCode::Config, "projectile: induced coupling/saturation must be >= 0");
    }
  }
};

/// Moment from remanence and volume for a sintered NdFeB slug:
/// m = Br * (mass / density) / mu0.
inline double ndfeb_moment_from_mass(double mass, double remanence = 1.45,
                                     double density = 7500.0) {
  return remanence * (mass / density) / kMu0;
}

/// Stock 6.06 g N52 slug. Moment derived from mass and bulk NdFeB numbers
/// (about 0.932 A m^2); the real slug's dimensions were never measured.
inline Projectile n52_projectile() {
  Projectile p;
  p.mass = 6.06e-3;
  p.half_length = 5.0e-3;
  p.model = PermanentDipole{ndfeb_moment_from_mass(p.mass)};
  return p;
}

/// Stock 3.73 g ferrite rod. Coupling and saturation are demo calibration
/// values (the rod's permeability and geometry are unknown), chosen so the
/// rod saturates early and shows visible suckback under a long pulse.
inline Projectile ferrite_projectile() {
  Projectile p;
  p.mass = 3.73e-3;
  p.half_length = 12.0e-3;
  p.model = InducedDipole{40.0, 0.45};
  return p;
}

/// Signed axial dipole moment at local field B. Induced moments follow the
/// field's sign and clamp at saturation; permanent moments are constant.
inline double dipole_moment(const Projectile& p, double B) {
  if (const auto* perm = std::get_if<PermanentDipole>(&p.model)) return perm->moment;
  const auto& ind = std::get<InducedDipole>(p.model);
  return std::clamp(ind.coupling * B, -ind.saturation_moment, ind.saturation_moment);
}

/// Axial force on the projectile at a field sample: F = m(B) * dB/dx,
/// the on-axis component of grad(m . B) with the moment frozen at its local
/// value (point-dipole approximation).
inline double axial_force(const Projectile& p, const FieldSample& sample) {
  return dipole_moment(p, sample.B) * sample.dBdx;
}

/// Electrical-to-mechanical conversion: exit kinetic energy over the
/// capacitor energy drop. Zero velocity reads as zero efficiency.
inline double efficiency(double mass, double v, double capacitance, double v_i,
                         double v_f) {
  if (v == 0.0) return 0.0;
  if (!(v_i > v_f) || v_f < 0.0)
    fail(ErrorCode::Audit,
         "efficiency: unphysical capacitor voltages (v_i <= v_f with motion)");
  return 0.5 * mass * v * v / (0.5 * capacitance * (v_i * v_i - v_f * v_f));
}

struct KinematicSample {
  double t = 0.0;      // [s]
  double x = 0.0;      // projectile center [m]
  double v = 0.0;      // [m/s]
  double force = 0.0;  // [N]
};

struct EnergyAudit {
  double cap_energy_drop = 0.0;    // 0.5 C (Vi^2 - Vf^2) [J]
  double dissipated = 0.0;         // resistive + flyback-diode losses [J]
  double inductor_residual = 0.0;  // 0.5 L I_end^2 [J]
  double kinetic_exit = 0.0;       // 0.5 m v_exit^2 [J]
};

struct SimResult {
  double exit_velocity = 0.0;  // [m/s]; velocity at termination when stalled
  bool stalled = false;
  double v_i = 0.0;            // [V]
  double v_f = 0.0;            // [V]
  double efficiency = 0.0;
  CurrentTrace trace;
  std::vector<KinematicSample> kinematics;
  EnergyAudit energy;
};

/// Co-integrates the discharge circuit and the projectile's Newtonian motion
/// on a shared RK4 time base. The field is quasi-static: the stack's
/// per-unit-current field scaled by the instantaneous coil current; the
/// motion does not feed back into the circuit (no motional EMF, a known
/// fidelity limit of the lumped model).
///
/// x0 is the initial standoff of the projectile center from the first loop
/// plane, positive outside the coil. The run terminates when the center
/// passes the tube end plus half_length (exit), or when the schedule is
/// spent, the current is dead and no force remains; still moving forward
/// then counts as a coasting exit, otherwise the launch stalled.
inline SimResult launch(const FieldTable& field, const TubeSpec& tube,
                        const CoilElectrical& coil, const Capacitor& cap,
                        const PulseSchedule& schedule, const Projectile& projectile,
                        double x0, const SolverOptions& opts = {}) {
  coil.validate();
  cap.validate();
  opts.validate();
  projectile.validate();
  tube.validate();
  if (schedule.segments.empty()) fail(ErrorCode::Config, "launch: empty schedule");

  const detail::CircuitParams p{coil.inductance,
                                coil.resistance + cap.series_resistance,
                                cap.capacitance, cap.flyback_diode_drop};
  const double x_start = field.first_loop_x() - x0;
  const double exit_x = tube.length + projectile.half_length;
  if (x_start >= exit_x) fail(ErrorCode::Config, "launch: projectile starts past the tube end");

  // state: i, v_cap, x, v, dissipated energy
  std::array<double, 5> y{0.0, cap.v, x_start, 0.0, 0.0};
  double t = 0.0;
  int sigma = 0;
  int branch = 0;  // frozen per step

  auto total_force = [&](const std::array<double, 5>& s) {
    const FieldSample fs = field.sample(s[0], s[2]);
    double F = axial_force(projectile, fs);
    if (projectile.friction > 0.0 && s[3] != 0.0)
      F -= projectile.friction * (s[3] > 0.0 ? 1.0 : -1.0);
    return F;
  };
  auto rhs = [&](const std::array<double, 5>& s, std::array<double, 5>& d) {
    detail::circuit_rhs(s[0], s[1], branch, sigma == 0, p, d[0], d[1]);
    d[2] = s[3];
    d[3] = total_force(s) / projectile.mass;
    d[4] = detail::dissipation_rate(s[0], sigma == 0, p);
  };

  SimResult result;
  result.v_i = cap.v;

  long next_log = 0;
  auto log_time = [&]() { return static_cast<double>(next_log) * opts.log_cadence; };
  auto log_if_due = [&]() {
    while (log_time() <= t + 1e-12) {
      const double tl = log_time();
      result.trace.samples.push_back(
          {tl, y[0], y[1], static_cast<int>(polarity_at(schedule, tl))});
      result.kinematics.push_back({tl, y[2], y[3], total_force(y)});
      ++next_log;
    }
  };
  log_if_due();

  bool exited = false;
  bool drained = false;  // schedule spent, current dead, no force left

  // Advance to t_stop; returns early on exit (bisected to the crossing) or,
  // in buffer, on the current clamping to zero mid-segment (integration then
  // resumes from the clamp instant).
  enum class StopReason { Reached, Exited };
  auto advance_to = [&](double t_stop) -> StopReason {
    while (t_stop - t > 1e-13) {
      long n = static_cast<long>(std::ceil((t_stop - t) / opts.dt_internal - 1e-9));
      if (n < 1) n = 1;
      const double h = (t_stop - t) / static_cast<double>(n);
      branch = detail::effective_branch(sigma, y[0]);
      auto y2 = detail::rk4_step(y, h, rhs);
      if (y2[2] >= exit_x) {
        const double tau = detail::bisect_event(
            y, h, rhs,
            [&](const std::array<double, 5>& s2) { return s2[2] >= exit_x; });
        y = detail::rk4_step(y, tau, rhs);
        t += tau;
        return StopReason::Exited;
      }
      if (sigma == 0 && y[0] != 0.0 && detail::sign_flipped(y[0], y2[0])) {
        const bool was_positive = y[0] > 0.0;
        const double tau = detail::bisect_event(
            y, h, rhs, [&](const std::array<double, 5>& s2) {
              return was_positive ? s2[0] <= 0.0 : s2[0] >= 0.0;
            });
        y = detail::rk4_step(y, tau, rhs);
        y[0] = 0.0;
        t += tau;
        continue;
      }
      if (projectile.friction > 0.0 && y[0] == 0.0 && y[3] != 0.0 &&
          detail::sign_flipped(y[3], y2[3])) {
        // friction stops coasting motion; clamp velocity at the standstill
        const bool was_positive = y[3] > 0.0;
        const double tau = detail::bisect_event(
            y, h, rhs, [&](const std::array<double, 5>& s2) {
              return was_positive ? s2[3] <= 0.0 : s2[3] >= 0.0;
            });
        y = detail::rk4_step(y, tau, rhs);
        y[3] = 0.0;
        t += tau;
        continue;
      }
      y = y2;
      t += h;
    }
    t = t_stop;
    return StopReason::Reached;
  };

  const double schedule_end = schedule.total_seconds();
  const double t_hard_stop = schedule_end + 5.0;
  const auto boundaries = detail::segment_boundaries_ms(schedule);
  std::size_t seg = 0;

  while (!exited && !drained && t < t_hard_stop) {
    while (seg < boundaries.size() &&
           t >= static_cast<double>(boundaries[seg].second) / 1000.0 - 1e-13)
      ++seg;
    sigma = seg < boundaries.size() ? boundaries[seg].first : 0;
    const double seg_end = seg < boundaries.size()
                               ? static_cast<double>(boundaries[seg].second) / 1000.0
                               : t_hard_stop;
    const double stop = std::min({seg_end, log_time(), t_hard_stop});
    if (advance_to(stop) == StopReason::Exited) {
      exited = true;
      break;
    }
    log_if_due();
    if (t >= schedule_end - 1e-13 && y[0] == 0.0 && std::abs(total_force(y)) < 1e-9)
      drained = true;
  }

  result.trace.t_end = t;
  result.trace.i_end = y[0];
  result.trace.v_cap_end = y[1];
  result.trace.dissipated_energy = y[4];
  result.v_f = y[1];

  if (!exited && drained && y[3] > 0.0) exited = true;  // coasts out on momentum
  result.exit_velocity = y[3];
  result.stalled = !exited;

  result.energy.cap_energy_drop =
      0.5 * cap.capacitance * (result.v_i * result.v_i - result.v_f * result.v_f);
  result.energy.dissipated = y[4];
  result.energy.inductor_residual = 0.5 * coil.inductance * y[0] * y[0];
  result.energy.kinetic_exit =
      exited ? 0.5 * projectile.mass * y[3] * y[3] : 0.0;
  result.efficiency = (exited && y[3] > 0.0)
                          ? efficiency(projectile.mass, y[3], cap.capacitance,
                                       result.v_i, result.v_f)
                          : 0.0;
  return result;
}

/// Convenience overload that builds the field cache for a one-off run.
inline SimResult launch(const LoopStack& stack, const TubeSpec& tube,
                        const CoilElectrical& coil, const Capacitor& cap,
                        const PulseSchedule& schedule, const Projectile& projectile,
                        double x0, const SolverOptions& opts = {}) {
  if (stack.empty()) fail(ErrorCode::Domain, "launch: empty loop stack");
  const double lo = std::min(stack.min_x() - x0, stack.min_x()) - 0.02;
  const double hi = tube.length + projectile.half_length + 0.02;
  FieldTable field(stack, lo, hi);
  return launch(field, tube, coil, cap, schedule, projectile, x0, opts);
}

}  // namespace coilsim
