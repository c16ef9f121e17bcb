#pragma once

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "coilsim/dynamics.hpp"

namespace coilsim {

enum class Objective { Velocity, Efficiency };

inline Objective objective_from_name(std::string_view name) {
  if (name == "velocity") return Objective::Velocity;
  if (name == "efficiency") return Objective::Efficiency;
  fail(ErrorCode::Config, "unknown objective '" + std::string(name) + "'");
}

inline const char* objective_name(Objective o) {
  return o == Objective::Velocity ? "velocity" : "efficiency";
}

/// Everything a launch needs except the quantity being swept. The field
/// cache is built once and shared by every evaluation.
struct LaunchContext {
  LoopStack stack;
  TubeSpec tube;
  CoilElectrical coil;
  Capacitor cap;
  Projectile projectile;
  SolverOptions solver;
  FieldTable field;

  LaunchContext(LoopStack stack_in, const TubeSpec& tube_in, const CoilElectrical& coil_in,
                const Capacitor& cap_in, const Projectile& projectile_in,
                const SolverOptions& solver_in = {}, double max_standoff = 0.12)
      : stack(std::move(stack_in)),
        tube(tube_in),
        coil(coil_in),
        cap(cap_in),
        projectile(projectile_in),
        solver(solver_in),
        field(stack, stack.min_x() - max_standoff - 0.02,
              tube_in.length + projectile_in.half_length + 0.02) {}

  SimResult run(const PulseSchedule& schedule, double x0) const {
    return launch(field, tube, coil, cap, schedule, projectile, x0, solver);
  }
};

struct SweepPoint {
  std::string input;  // displacement in mm, or a canonical pulse schedule
  double velocity = 0.0;
  double efficiency = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;      // in deterministic evaluation order
  std::size_t best_velocity = 0;       // index of the velocity argmax
  std::size_t best_efficiency = 0;     // index of the efficiency argmax

  const SweepPoint& best(Objective o) const {
    return points.at(o == Objective::Velocity ? best_velocity : best_efficiency);
  }

  /// Byte-stable CSV form (also the `sweep` subcommand's file format).
  std::string serialize() const {
    std::string out = "input,velocity_mps,efficiency\n";
    char buf[96];
    for (const auto& p : points) {
      std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g\n", p.input.c_str(),
                    p.velocity, p.efficiency);
      out += buf;
    }
    return out;
  }
};

struct DisplacementGrid {
  double min_mm = 0.0;
  double max_mm = 0.0;
  double step_mm = 0.0;

  void validate() const {
    if (!(min_mm < max_mm)) fail(ErrorCode::Config, "sweep: min must be < max");
    if (!(step_mm > 0.0)) fail(ErrorCode::Config, "sweep: step must be > 0");
  }

  std::vector<double> values_mm() const {
    validate();
    std::vector<double> out;
    for (long k = 0;; ++k) {
      const double v = min_mm + static_cast<double>(k) * step_mm;
      if (v > max_mm + 1e-9) break;
      out.push_back(v);
    }
    return out;
  }
};

namespace detail {

template <class Fn>
inline void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(workers, count));
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// first strict maximum keeps the earliest (smallest) input on ties
inline void find_argmax(SweepResult& result) {
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    if (result.points[i].velocity > result.points[result.best_velocity].velocity)
      result.best_velocity = i;
    if (result.points[i].efficiency > result.points[result.best_efficiency].efficiency)
      result.best_efficiency = i;
  }
}

inline std::string format_mm(double mm) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", mm);
  return buf;
}

}  // namespace detail

/// One launch per grid point of initial displacement (mm, projectile center
/// to the first loop plane, positive outside the coil). The full curve comes
/// back for plotting along with the argmax under each objective.
inline SweepResult sweep_displacement(const LaunchContext& ctx,
                                      const PulseSchedule& schedule,
                                      const DisplacementGrid& grid,
                                      unsigned workers = 1) {
  const auto values = grid.values_mm();
  if (values.empty()) fail(ErrorCode::Config, "sweep: empty displacement grid");

  SweepResult result;
  result.points.resize(values.size());
  detail::parallel_for(values.size(), workers, [&](std::size_t i) {
    const SimResult sim = ctx.run(schedule, from_mm(values[i]));
    result.points[i] = {detail::format_mm(values[i]), sim.exit_velocity, sim.efficiency};
  });
  detail::find_argmax(result);
  return result;
}

/// A schedule shape such as "F? B? R?": fixed-duration tokens pass through,
/// '?' slots take durations from per-slot grids.
struct PulseTemplate {
  struct Token {
    BridgeState state = BridgeState::Buffer;
    int duration_ms = 0;
    bool open = false;
  };
  std::vector<Token> tokens;

  static PulseTemplate parse(std::string_view text) {
    PulseTemplate tpl;
    std::size_t pos = 0;
    int index = 0;
    while (pos < text.size()) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos >= text.size()) break;
      std::size_t end = pos;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
      const std::string_view token = text.substr(pos, end - pos);
      pos = end;
      ++index;
      const std::string where = "template token " + std::to_string(index) + " ('" +
                                std::string(token) + "')";
      const char letter =
          static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
      BridgeState state;
      if (letter == 'F') state = BridgeState::Forward;
      else if (letter == 'B') state = BridgeState::Buffer;
      else if (letter == 'R') state = BridgeState::Reverse;
      else fail(ErrorCode::Parse, "pulse: " + where + ": unknown state letter");
      const std::string_view rest = token.substr(1);
      if (rest == "?") {
        tpl.tokens.push_back({state, 0, true});
      } else {
        const PulseSchedule one = parse_schedule(std::string(1, letter) + std::string(rest));
        tpl.tokens.push_back({state, one.segments.front().duration_ms, false});
      }
    }
    if (tpl.tokens.empty()) fail(ErrorCode::Parse, "pulse: empty template");
    return tpl;
  }

  int open_slots() const {
    int n = 0;
    for (const auto& t : tokens) n += t.open ? 1 : 0;
    return n;
  }

  PulseSchedule realize(const std::vector<int>& durations,
                        int max_total_ms = PulseSchedule::kDefaultMaxTotalMs) const {
    PulseSchedule s;
    std::size_t slot = 0;
    for (const auto& t : tokens) {
      const int d = t.open ? durations.at(slot++) : t.duration_ms;
      if (d <= 0) fail(ErrorCode::Config, "pulse template: slot durations must be positive");
      s.segments.push_back({t.state, d});
    }
    if (s.total_ms() > max_total_ms)
      fail(ErrorCode::Config, "pulse template: total exceeds maximum schedule length");
    return s;
  }
};

struct SearchOptions {
  std::size_t budget = 100000;   // maximum number of launches
  bool coordinate_refine = false;  // one descent pass per slot after the grid
  unsigned workers = 1;
};

/// Exhaustive product-grid search over the template's open slots, in
/// lexicographic slot order (ties keep the lexicographically smallest
/// durations). The optional coordinate-descent refinement re-scans each slot
/// once around the incumbent on the same grids.
inline SweepResult search_pulses(const LaunchContext& ctx, double x0,
                                 const PulseTemplate& tpl,
                                 const std::vector<std::vector<int>>& grids,
                                 Objective objective, const SearchOptions& opts = {}) {
  const int slots = tpl.open_slots();
  if (static_cast<int>(grids.size()) != slots)
    fail(ErrorCode::Config, "search_pulses: need one duration grid per open slot");
  std::size_t product = 1;
  for (const auto& g : grids) {
    if (g.empty()) fail(ErrorCode::Config, "search_pulses: empty duration grid");
    product *= g.size();
    if (product > opts.budget)
      fail(ErrorCode::Budget, "search_pulses: grid product exceeds budget of " +
                                  std::to_string(opts.budget) + " runs");
  }

  // enumerate duration tuples in lexicographic order (last slot fastest)
  std::vector<std::vector<int>> tuples;
  tuples.reserve(product);
  std::vector<std::size_t> idx(grids.size(), 0);
  for (bool done = false; !done;) {
    std::vector<int> tuple(grids.size());
    for (std::size_t s = 0; s < grids.size(); ++s) tuple[s] = grids[s][idx[s]];
    tuples.push_back(std::move(tuple));
    done = true;
    for (std::size_t s = grids.size(); s-- > 0;) {
      if (++idx[s] < grids[s].size()) {
        done = false;
        break;
      }
      idx[s] = 0;
    }
  }

  SweepResult result;
  result.points.resize(tuples.size());
  std::map<std::vector<int>, std::pair<double, double>> cache;
  detail::parallel_for(tuples.size(), opts.workers, [&](std::size_t i) {
    const PulseSchedule s = tpl.realize(tuples[i]);
    const SimResult sim = ctx.run(s, x0);
    result.points[i] = {format_schedule(s), sim.exit_velocity, sim.efficiency};
  });
  for (std::size_t i = 0; i < tuples.size(); ++i)
    cache.emplace(tuples[i], std::make_pair(result.points[i].velocity,
                                            result.points[i].efficiency));
  detail::find_argmax(result);

  if (opts.coordinate_refine && !grids.empty()) {
    auto score = [&](const std::pair<double, double>& ve) {
      return objective == Objective::Velocity ? ve.first : ve.second;
    };
    auto evaluate = [&](const std::vector<int>& tuple) {
      auto it = cache.find(tuple);
      if (it != cache.end()) return it->second;
      const SimResult sim = ctx.run(tpl.realize(tuple), x0);
      auto ve = std::make_pair(sim.exit_velocity, sim.efficiency);
      cache.emplace(tuple, ve);
      result.points.push_back({format_schedule(tpl.realize(tuple)), ve.first, ve.second});
      return ve;
    };
    const std::size_t start_index = objective == Objective::Velocity
                                        ? result.best_velocity
                                        : result.best_efficiency;
    std::vector<int> incumbent = tuples[std::min(start_index, tuples.size() - 1)];
    double best = score(evaluate(incumbent));
    for (std::size_t s = 0; s < grids.size(); ++s) {
      for (int candidate : grids[s]) {
        std::vector<int> trial = incumbent;
        trial[s] = candidate;
        const double v = score(evaluate(trial));
        if (v > best) {
          best = v;
          incumbent = trial;
        }
      }
    }
    detail::find_argmax(result);
  }
  return result;
}

}  // namespace coilsim
