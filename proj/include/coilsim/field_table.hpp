#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "coilsim/magnetostatics.hpp"

namespace coilsim {

/// Per-unit-current on-axis field of a loop stack cached on a uniform grid.
/// Each grid node stores the analytic field, gradient and curvature, so B and
/// dB/dx interpolate as cubic Hermite segments and stay smooth; scaling by
/// the drive current is exact. Positions outside the grid fall back to
/// direct superposition.
class FieldTable {
 public:
  FieldTable(LoopStack stack, double x_min, double x_max, double step = 1e-4)
      : stack_(std::move(stack)), x0_(x_min), h_(step) {
    if (stack_.empty()) fail(ErrorCode::Domain, "FieldTable: empty loop stack");
    if (!(step > 0.0) || !(x_max > x_min))
      fail(ErrorCode::Domain, "FieldTable: bad grid");
    const std::size_t n =
        static_cast<std::size_t>(std::ceil((x_max - x_min) / step)) + 2;
    nodes_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = x0_ + static_cast<double>(j) * h_;
      Node node{};
      for (const auto& loop : stack_.loops) {
        const double dx = x - loop.x;
        node.B += loop_field(1.0, loop.r, dx);
        node.dB += loop_field_gradient(1.0, loop.r, dx);
        node.d2B += loop_field_curvature(1.0, loop.r, dx);
      }
      nodes_.push_back(node);
    }
  }

  const LoopStack& stack() const { return stack_; }
  double first_loop_x() const { return stack_.min_x(); }

  FieldSample sample(double current, double x) const {
    const double s = (x - x0_) / h_;
    if (s < 0.0 || s >= static_cast<double>(nodes_.size() - 1))
      return superpose(stack_, current, x);
    const std::size_t j = static_cast<std::size_t>(s);
    const double u = s - static_cast<double>(j);
    const Node& a = nodes_[j];
    const Node& b = nodes_[j + 1];
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    const double B = h00 * a.B + h10 * h_ * a.dB + h01 * b.B + h11 * h_ * b.dB;
    const double g = h00 * a.dB + h10 * h_ * a.d2B + h01 * b.dB + h11 * h_ * b.d2B;
    return {x, current * B, current * g};
  }

 private:
  struct Node {
    double B = 0.0;
    double dB = 0.0;
    double d2B = 0.0;
  };

  LoopStack stack_;
  double x0_;
  double h_;
  std::vector<Node> nodes_;
};

}  // namespace coilsim
