#pragma once

#include <cmath>

#include "coilsim/error.hpp"
#include "coilsim/units.hpp"
#include "coilsim/winding.hpp"

namespace coilsim {

/// Self-inductance of one circular loop of radius r made from round wire of
/// radius a (thin-wire form): mu0 * r * (ln(8r/a) - 2).
inline double loop_self_inductance(double loop_radius, double wire_radius) {
  if (!(loop_radius > 0.0) || !(wire_radius > 0.0) || !(loop_radius > wire_radius))
    fail(ErrorCode::Domain, "loop_self_inductance: need loop radius > wire radius > 0");
  return kMu0 * loop_radius * (std::log(8.0 * loop_radius / wire_radius) - 2.0);
}

/// Mutual inductance of two coaxial circular loops with axial separation dz
/// (Maxwell's formula):
///   M = mu0 * sqrt(r1 r2) * ((2/k - k) K(k) - (2/k) E(k)),
///   k^2 = 4 r1 r2 / ((r1 + r2)^2 + dz^2).
inline double mutual_inductance(double r1, double r2, double dz) {
  if (!(r1 > 0.0) || !(r2 > 0.0))
    fail(ErrorCode::Domain, "mutual_inductance: radii must be > 0");
  const double denom = (r1 + r2) * (r1 + r2) + dz * dz;
  const double k2 = 4.0 * r1 * r2 / denom;
  if (!(k2 < 1.0))
    fail(ErrorCode::Domain, "mutual_inductance: coincident loops");
  const double k = std::sqrt(k2);
  const double K = std::comp_ellint_1(k);
  const double E = std::comp_ellint_2(k);
  return kMu0 * std::sqrt(r1 * r2) * ((2.0 / k - k) * K - (2.0 / k) * E);
}

/// Total conductor length of a digitized stack.
inline double wire_length(const LoopStack& stack) {
  double len = 0.0;
  for (const auto& l : stack.loops) len += 2.0 * kPi * l.r;
  return len;
}

/// Lumped electrical estimate for a digitized coil. Resistance is exact for
/// the geometry (wire length times resistance per length). Inductance sums
/// every loop's self term plus the mutual term of every coaxial pair; all
/// loops carry the same series current, so
///   L = sum_i L_i + 2 * sum_{i<j} M_ij.
inline CoilElectrical estimate_electrical(const LoopStack& stack, const WireSpec& wire) {
  if (stack.empty())
    fail(ErrorCode::Domain, "estimate_electrical: empty loop stack");
  wire.validate();

  const double a = wire.radius();
  const std::size_t n = stack.size();
  double inductance = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    inductance += loop_self_inductance(stack.loops[i].r, a);
  for (std::size_t i = 0; i < n; ++i) {
    const Loop& li = stack.loops[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Loop& lj = stack.loops[j];
      inductance += 2.0 * mutual_inductance(li.r, lj.r, li.x - lj.x);
    }
  }
  return {inductance, wire_length(stack) * wire.resistance_per_length};
}

}  // namespace coilsim
