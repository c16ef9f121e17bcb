#pragma once

#include <cmath>

#include "coilsim/error.hpp"
#include "coilsim/units.hpp"
#include "coilsim/winding.hpp"

namespace coilsim {

/// On-axis field sample: axial component B and its axial gradient. The
/// radial component cancels on the axis, so this is the whole story there.
struct FieldSample {
  double x = 0.0;     // [m]
  double B = 0.0;     // [T]
  double dBdx = 0.0;  // [T/m]
};

/// Geometry of continuous winding layers (sheet-current approximation).
/// `radius` drives the single/double layer forms, `outer_radius`/
/// `inner_radius` the uniform multilayer form; `layer_step` is the radial
/// increment between stacked layers (one bare wire diameter).
struct LayerGeometry {
  double turns = 0.0;         // total turn count N
  double length = 0.0;        // axial length [m]
  double left_edge = 0.0;     // axial position of the left edge [m]
  double radius = 0.0;        // [m]
  double outer_radius = 0.0;  // [m]
  double inner_radius = 0.0;  // [m]
  double layer_step = 0.0;    // [m]
};

/// Axial field of one circular current loop, observation point x measured
/// from the loop plane:  B = mu0 I R^2 / (2 (x^2 + R^2)^(3/2)).
inline double loop_field(double current, double radius, double x) {
  if (!(radius > 0.0)) fail(ErrorCode::Domain, "loop_field: radius must be > 0");
  const double d2 = x * x + radius * radius;
  return kMu0 * current * radius * radius / (2.0 * d2 * std::sqrt(d2));
}

/// d/dx of loop_field:  -3 mu0 I R^2 x / (2 (x^2 + R^2)^(5/2)).
inline double loop_field_gradient(double current, double radius, double x) {
  if (!(radius > 0.0)) fail(ErrorCode::Domain, "loop_field_gradient: radius must be > 0");
  const double d2 = x * x + radius * radius;
  return -1.5 * kMu0 * current * radius * radius * x / (d2 * d2 * std::sqrt(d2));
}

/// d2/dx2 of loop_field:  3 mu0 I R^2 (4x^2 - R^2) / (2 (x^2 + R^2)^(7/2)).
inline double loop_field_curvature(double current, double radius, double x) {
  if (!(radius > 0.0)) fail(ErrorCode::Domain, "loop_field_curvature: radius must be > 0");
  const double d2 = x * x + radius * radius;
  const double d3 = d2 * d2 * d2;
  return 1.5 * kMu0 * current * radius * radius * (4.0 * x * x - radius * radius) /
         (d3 * std::sqrt(d2));
}

/// Superposed on-axis field of every loop in a stack. The gradient is the
/// analytic per-loop derivative summed, not a finite difference.
inline FieldSample superpose(const LoopStack& stack, double current, double x) {
  if (stack.empty()) fail(ErrorCode::Domain, "superpose: empty loop stack");
  double B = 0.0;
  double g = 0.0;
  for (const auto& loop : stack.loops) {
    const double dx = x - loop.x;
    B += loop_field(current, loop.r, dx);
    g += loop_field_gradient(current, loop.r, dx);
  }
  return {x, B, g};
}

namespace detail {
inline double sheet_edge_term(double u, double radius) {
  return u / std::sqrt(u * u + radius * radius);
}
}  // namespace detail

/// Closed-form on-axis field of one winding layer of N turns spread
/// uniformly over `length`, evaluated at x. The layer spans
/// [left_edge, left_edge + length]; shifting the edge terms by -x evaluates
/// the field at an arbitrary observation point.
inline double single_layer_field(const LayerGeometry& g, double current, double x) {
  if (!(g.length > 0.0)) fail(ErrorCode::Domain, "single_layer_field: length must be > 0");
  if (!(g.radius > 0.0)) fail(ErrorCode::Domain, "single_layer_field: radius must be > 0");
  const double lo = g.left_edge - x;
  const double hi = lo + g.length;
  return kMu0 * g.turns * current / (2.0 * g.length) *
         (detail::sheet_edge_term(hi, g.radius) - detail::sheet_edge_term(lo, g.radius));
}

/// Two stacked layers, radii R and R + layer_step, N turns each.
inline double double_layer_field(const LayerGeometry& g, double current, double x) {
  LayerGeometry outer = g;
  outer.radius = g.radius + g.layer_step;
  return single_layer_field(g, current, x) + single_layer_field(outer, current, x);
}

/// Closed-form on-axis field of a uniform multilayer block wound from
/// inner_radius out to outer_radius (N total turns). Integrating the
/// single-layer form across the radius gives the logarithmic expression
///   B = mu0 N I / (2 L (Ro - Ri)) * (T(hi) - T(lo)),
///   T(u) = u * ln( (sqrt(u^2 + Ro^2) + Ro) / (sqrt(u^2 + Ri^2) + Ri) ).
inline double multilayer_field(const LayerGeometry& g, double current, double x) {
  if (!(g.length > 0.0)) fail(ErrorCode::Domain, "multilayer_field: length must be > 0");
  if (!(g.inner_radius > 0.0))
    fail(ErrorCode::Domain, "multilayer_field: inner_radius must be > 0");
  if (!(g.outer_radius > g.inner_radius))
    fail(ErrorCode::Domain, "multilayer_field: outer_radius must exceed inner_radius");
  const double ro = g.outer_radius;
  const double ri = g.inner_radius;
  const double lo = g.left_edge - x;
  const double hi = lo + g.length;
  const auto log_term = [&](double u) {
    return u * std::log((std::sqrt(u * u + ro * ro) + ro) /
                        (std::sqrt(u * u + ri * ri) + ri));
  };
  return kMu0 * g.turns * current / (2.0 * g.length * (ro - ri)) *
         (log_term(hi) - log_term(lo));
}

}  // namespace coilsim
