#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "coilsim/circuit.hpp"
#include "coilsim/dynamics.hpp"
#include "coilsim/magnetostatics.hpp"
#include "coilsim/units.hpp"

// Deterministic CSV writers. No timestamps, fixed formatting.
namespace coilsim::csv {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline long as_ms(double t_seconds) { return std::lround(t_seconds * 1000.0); }

inline void write_field(std::ostream& out, const std::vector<FieldSample>& samples) {
  out << "x_mm,B_T,dBdx_T_per_m\n";
  for (const auto& s : samples)
    out << num(to_mm(s.x)) << ',' << num(s.B) << ',' << num(s.dBdx) << '\n';
}

inline void write_trace(std::ostream& out, const CurrentTrace& trace) {
  out << "t_ms,i_A,vcap_V,polarity\n";
  for (const auto& s : trace.samples)
    out << as_ms(s.t) << ',' << num(s.i_coil) << ',' << num(s.v_cap) << ','
        << s.polarity << '\n';
}

inline void write_kinematics(std::ostream& out, const std::vector<KinematicSample>& rows) {
  out << "t_ms,x_mm,v_mps,F_N\n";
  for (const auto& s : rows)
    out << as_ms(s.t) << ',' << num(to_mm(s.x)) << ',' << num(s.v) << ','
        << num(s.force) << '\n';
}

}  // namespace coilsim::csv
