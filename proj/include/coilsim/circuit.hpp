#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "coilsim/error.hpp"
#include "coilsim/pulse.hpp"
#include "coilsim/winding.hpp"

namespace coilsim {

struct Capacitor {
  double capacitance = 0.12;        // [F]
  double v = 45.0;                  // initial charge voltage [V]
  double series_resistance = 0.0;   // optional ESR [ohm]
  double flyback_diode_drop = 0.0;  // forward drop of the recovery diodes [V]

  void validate() const {
    if (!(capacitance > 0.0)) fail(ErrorCode::Config, "capacitor: capacitance must be > 0");
    if (series_resistance < 0.0)
      fail(ErrorCode::Config, "capacitor: series_resistance must be >= 0");
    if (flyback_diode_drop < 0.0)
      fail(ErrorCode::Config, "capacitor: flyback_diode_drop must be >= 0");
  }
};

struct CircuitState {
  double t = 0.0;       // [s]
  double v_cap = 0.0;   // [V]
  double i_coil = 0.0;  // [A]
  BridgeState polarity = BridgeState::Buffer;
};

struct TraceSample {
  double t = 0.0;       // [s]
  double i_coil = 0.0;  // [A]
  double v_cap = 0.0;   // [V]
  int polarity = 0;
};

struct CurrentTrace {
  std::vector<TraceSample> samples;  // fixed log cadence, starting at t = 0
  double t_end = 0.0;
  double i_end = 0.0;
  double v_cap_end = 0.0;
  double dissipated_energy = 0.0;  // resistive + flyback-diode losses [J]
};

struct SolverOptions {
  double dt_internal = 5e-6;  // [s]
  double log_cadence = 1e-3;  // [s]

  void validate() const {
    if (!(dt_internal > 0.0)) fail(ErrorCode::Config, "solver: dt_internal must be > 0");
    if (dt_internal > 1e-5 + 1e-15)
      fail(ErrorCode::Config, "solver: dt_internal must be <= 10 us to resolve the coil L/R");
    if (!(log_cadence > 0.0)) fail(ErrorCode::Config, "solver: log_cadence must be > 0");
  }
};

namespace detail {

struct CircuitParams {
  double inductance;
  double resistance;  // coil resistance plus capacitor ESR
  double capacitance;
  double diode_drop;  // flyback diode forward drop, active in Buffer only
};

// Series lumped circuit on one smooth branch. branch > 0 is the Forward
// drive equations, branch < 0 the Reverse ones, branch == 0 an open coil.
// Buffer free-wheeling reuses the drive branches with the diode drop added
// to the opposing voltage: positive current through the flyback path obeys
// the Reverse-form equations (recharging the capacitor), negative current
// the Forward-form ones. The symmetric branch structure keeps a Forward run
// and its mirrored Reverse run exact sign images of each other in floating
// point.
inline void circuit_rhs(double i, double v, int branch, bool flyback,
                        const CircuitParams& p, double& di, double& dv) {
  const double v_opp = flyback ? v + p.diode_drop : v;
  if (branch > 0) {
    di = (v_opp - p.resistance * i) / p.inductance;
    dv = -i / p.capacitance;
  } else if (branch < 0) {
    di = (-v_opp - p.resistance * i) / p.inductance;
    dv = i / p.capacitance;
  } else {
    di = 0.0;
    dv = 0.0;
  }
}

// Instantaneous dissipation: coil/ESR losses everywhere, plus the diode
// drop's share while free-wheeling. Keeping it in the integrated state lets
// the energy audit close exactly.
inline double dissipation_rate(double i, bool flyback, const CircuitParams& p) {
  return p.resistance * i * i + (flyback ? p.diode_drop * std::abs(i) : 0.0);
}

// Branch for the coming step. In Buffer the branch freezes to the flyback
// path of the current's entry sign, so the flow stays smooth across the
// step and the zero crossing is a clean sign flip to clamp on.
inline int effective_branch(int sigma, double i) {
  if (sigma != 0) return sigma;
  if (i > 0.0) return -1;
  if (i < 0.0) return +1;
  return 0;
}

template <std::size_t N, class Rhs>
inline std::array<double, N> rk4_step(const std::array<double, N>& y, double dt, Rhs&& rhs) {
  std::array<double, N> k1, k2, k3, k4, tmp, out;
  rhs(y, k1);
  for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + 0.5 * dt * k1[n];
  rhs(tmp, k2);
  for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + 0.5 * dt * k2[n];
  rhs(tmp, k3);
  for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + dt * k3[n];
  rhs(tmp, k4);
  for (std::size_t n = 0; n < N; ++n)
    out[n] = y[n] + dt / 6.0 * (k1[n] + 2.0 * (k2[n] + k3[n]) + k4[n]);
  return out;
}

inline bool sign_flipped(double before, double after) {
  return (before > 0.0 && after <= 0.0) || (before < 0.0 && after >= 0.0);
}

// First sub-step length tau in (0, h] at which `hit` turns true, located by
// bisection on repeated trial RK4 steps from the same start state. `hit`
// must be true for the full step h.
template <std::size_t N, class Rhs, class Hit>
inline double bisect_event(const std::array<double, N>& y, double h, Rhs&& rhs,
                           Hit&& hit, int iterations = 64) {
  double lo = 0.0;
  double hi = h;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo) || !(mid < hi)) break;
    if (hit(rk4_step(y, mid, rhs))) hi = mid;
    else lo = mid;
  }
  return hi;
}

inline std::vector<std::pair<int, int>> segment_boundaries_ms(const PulseSchedule& s) {
  std::vector<std::pair<int, int>> out;  // (sigma, end_ms)
  int cum = 0;
  for (const auto& seg : s.segments) {
    cum += seg.duration_ms;
    out.emplace_back(static_cast<int>(seg.state), cum);
  }
  return out;
}

}  // namespace detail

/// One RK4 step of the lumped capacitor-coil circuit under a fixed bridge
/// polarity. In Buffer a zero crossing of the free-wheeling current clamps
/// to exactly zero: the flyback path stops conducting and the coil is open.
inline CircuitState step(const CircuitState& state, const CoilElectrical& coil,
                         const Capacitor& cap, BridgeState polarity, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::Config, "step: dt must be > 0");
  coil.validate();
  cap.validate();
  const detail::CircuitParams p{coil.inductance,
                                coil.resistance + cap.series_resistance,
                                cap.capacitance, cap.flyback_diode_drop};
  if (polarity == BridgeState::Buffer && state.i_coil == 0.0)
    return {state.t + dt, state.v_cap, 0.0, polarity};
  const bool flyback = polarity == BridgeState::Buffer;
  const int branch = detail::effective_branch(static_cast<int>(polarity), state.i_coil);
  const std::array<double, 2> y{state.i_coil, state.v_cap};
  auto rhs = [&](const std::array<double, 2>& s, std::array<double, 2>& d) {
    detail::circuit_rhs(s[0], s[1], branch, flyback, p, d[0], d[1]);
  };
  auto y2 = detail::rk4_step(y, dt, rhs);
  if (polarity == BridgeState::Buffer && detail::sign_flipped(y[0], y2[0])) y2[0] = 0.0;
  return {state.t + dt, y2[1], y2[0], polarity};
}

/// Integrates the capacitor discharge through the whole pulse schedule plus
/// a trailing Buffer until the coil current dies, logging at the configured
/// cadence. The run starts from rest (I = 0) with the capacitor charged.
inline CurrentTrace run_circuit(const CoilElectrical& coil, const Capacitor& cap,
                                const PulseSchedule& schedule,
                                const SolverOptions& opts = {}) {
  coil.validate();
  cap.validate();
  opts.validate();
  if (schedule.segments.empty()) fail(ErrorCode::Config, "run_circuit: empty schedule");

  const detail::CircuitParams p{coil.inductance,
                                coil.resistance + cap.series_resistance,
                                cap.capacitance, cap.flyback_diode_drop};
  // state: i, v_cap, dissipated energy
  std::array<double, 3> y{0.0, cap.v, 0.0};
  double t = 0.0;
  int sigma = 0;
  int branch = 0;  // frozen per step

  auto rhs = [&](const std::array<double, 3>& s, std::array<double, 3>& d) {
    detail::circuit_rhs(s[0], s[1], branch, sigma == 0, p, d[0], d[1]);
    d[2] = detail::dissipation_rate(s[0], sigma == 0, p);
  };

  CurrentTrace trace;
  long next_log = 0;
  auto log_time = [&]() { return static_cast<double>(next_log) * opts.log_cadence; };
  auto log_if_due = [&]() {
    while (log_time() <= t + 1e-12) {
      const double tl = log_time();
      trace.samples.push_back(
          {tl, y[0], y[1], static_cast<int>(polarity_at(schedule, tl))});
      ++next_log;
    }
  };
  log_if_due();

  // Advance to t_stop in steps of at most dt_internal. In Buffer the current
  // zero crossing is located by bisection and clamped to exactly zero. With
  // stop_on_clamp the function returns at the clamp instant.
  auto advance_to = [&](double t_stop, bool stop_on_clamp) -> bool {
    while (t_stop - t > 1e-13) {
      long n = static_cast<long>(std::ceil((t_stop - t) / opts.dt_internal - 1e-9));
      if (n < 1) n = 1;
      const double h = (t_stop - t) / static_cast<double>(n);
      branch = detail::effective_branch(sigma, y[0]);
      auto y2 = detail::rk4_step(y, h, rhs);
      if (sigma == 0 && y[0] != 0.0 && detail::sign_flipped(y[0], y2[0])) {
        const bool was_positive = y[0] > 0.0;
        const double tau = detail::bisect_event(
            y, h, rhs, [&](const std::array<double, 3>& s2) {
              return was_positive ? s2[0] <= 0.0 : s2[0] >= 0.0;
            });
        y = detail::rk4_step(y, tau, rhs);
        y[0] = 0.0;
        t += tau;
        if (stop_on_clamp) return true;
      } else {
        y = y2;
        t += h;
      }
    }
    t = t_stop;
    return false;
  };

  for (const auto& [seg_sigma, end_ms] : detail::segment_boundaries_ms(schedule)) {
    sigma = seg_sigma;
    const double seg_end = static_cast<double>(end_ms) / 1000.0;
    while (t < seg_end - 1e-13) {
      const double stop = std::min(seg_end, log_time());
      advance_to(stop, false);
      log_if_due();
    }
  }

  // trailing buffer: free-wheel until the current clamps to zero
  sigma = 0;
  const double t_hard_stop = t + 1.0;
  while (y[0] != 0.0 && t < t_hard_stop) {
    const double stop = std::min(t_hard_stop, log_time());
    if (advance_to(stop, true)) break;
    log_if_due();
  }

  trace.t_end = t;
  trace.i_end = y[0];
  trace.v_cap_end = y[1];
  trace.dissipated_energy = y[2];
  return trace;
}

}  // namespace coilsim
