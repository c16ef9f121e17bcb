#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "coilsim/error.hpp"
#include "coilsim/units.hpp"

namespace coilsim {

/// Magnet wire geometry and resistance. Defaults describe 22 AWG enameled
/// copper laid down on a 0.68 mm axial pitch (bare conductor 0.0256 in; the
/// extra 0.03 mm of pitch is enamel and packing slop).
struct WireSpec {
  double bare_diameter = 0.0256 * kInch;   // conductor diameter [m]
  double pitch = 0.68e-3;                  // axial center-to-center turn spacing [m]
  double resistance_per_length = 0.05295;  // [ohm/m]

  double radius() const { return 0.5 * bare_diameter; }

  void validate() const {
    if (!(bare_diameter > 0.0))
      fail(ErrorCode::Geometry, "wire: bare_diameter must be > 0");
    if (!(pitch >= bare_diameter))
      fail(ErrorCode::Geometry, "wire: pitch must be >= bare_diameter");
    if (!(resistance_per_length > 0.0))
      fail(ErrorCode::Geometry, "wire: resistance_per_length must be > 0");
  }
};

/// Coil former. Windings sit on the outer surface; long-coil geometry
/// (length well above radius) is assumed throughout.
struct TubeSpec {
  double length = 0.3556;         // [m] (14 in stock tube)
  double outer_radius = 3.95e-3;  // [m] (7.9 mm OD stock tube)

  void validate() const {
    if (!(length > 0.0)) fail(ErrorCode::Geometry, "tube: length must be > 0");
    if (!(outer_radius > 0.0))
      fail(ErrorCode::Geometry, "tube: outer_radius must be > 0");
    if (!(length > outer_radius))
      fail(ErrorCode::Geometry, "tube: length must exceed outer_radius (long-coil geometry)");
  }

  /// Centerline radius of the innermost winding layer.
  double innermost_radius(const WireSpec& wire) const {
    return outer_radius + 0.5 * wire.bare_diameter;
  }
};

struct WindingSection {
  double axial_extent = 0.0;  // [m]
  int layer_count = 0;        // 0 encodes a bare gap
};

/// A winding profile as an ordered run of sections along the tube, each with
/// a uniform layer count.
struct WindingProfile {
  std::string name;
  std::vector<WindingSection> sections;
  std::string notes;  // assumptions baked into stock profiles; not serialized

  double total_extent() const {
    double sum = 0.0;
    for (const auto& s : sections) sum += s.axial_extent;
    return sum;
  }

  int max_layers() const {
    int m = 0;
    for (const auto& s : sections) m = std::max(m, s.layer_count);
    return m;
  }

  void validate(const TubeSpec& tube) const {
    if (sections.empty())
      fail(ErrorCode::Geometry, "profile '" + name + "': no sections");
    for (const auto& s : sections) {
      if (!(s.axial_extent >= 0.0))
        fail(ErrorCode::Geometry, "profile '" + name + "': negative section extent");
      if (s.layer_count < 0)
        fail(ErrorCode::Geometry, "profile '" + name + "': negative layer count");
    }
    if (total_extent() > tube.length * (1.0 + 1e-9))
      fail(ErrorCode::Geometry,
           "profile '" + name + "': axial extent exceeds tube length");
    if (max_layers() < 1)
      fail(ErrorCode::Geometry, "profile '" + name + "': no wound section");
  }
};

struct Loop {
  double x = 0.0;  // axial position of the loop plane [m]
  double r = 0.0;  // loop radius [m]
};

/// A winding profile digitized into discrete coaxial current loops, one per
/// turn, ordered by (x, then r).
struct LoopStack {
  std::vector<Loop> loops;

  bool empty() const { return loops.empty(); }
  std::size_t size() const { return loops.size(); }

  double min_x() const {
    double m = loops.empty() ? 0.0 : loops.front().x;
    for (const auto& l : loops) m = std::min(m, l.x);
    return m;
  }
  double max_x() const {
    double m = loops.empty() ? 0.0 : loops.front().x;
    for (const auto& l : loops) m = std::max(m, l.x);
    return m;
  }

  /// Byte-stable text form, used for determinism checks.
  std::string serialize() const {
    std::string out = "loops " + std::to_string(loops.size()) + "\n";
    char buf[64];
    for (const auto& l : loops) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", l.x, l.r);
      out += buf;
    }
    return out;
  }
};

/// Number of whole turns tiled into an axial extent at the given pitch.
/// Rounded to the nearest count so that an extent of n*pitch holds exactly n
/// turns and the stock 355.6 mm tube at 0.68 mm pitch holds 523.
inline long turn_count(double axial_extent, double pitch) {
  if (!(pitch > 0.0)) fail(ErrorCode::Geometry, "turn_count: pitch must be > 0");
  return std::max(0L, std::lround(axial_extent / pitch));
}

/// Digitizes a winding profile into one current loop per turn. Layer k sits
/// at radius r0 + k*d with r0 the innermost winding radius and d the bare
/// wire diameter; within a section, turn centers tile the extent at the wire
/// pitch, offset half a pitch from the section edge.
inline LoopStack digitize(const WindingProfile& profile, const WireSpec& wire,
                          const TubeSpec& tube) {
  wire.validate();
  tube.validate();
  if (profile.total_extent() > tube.length * (1.0 + 1e-9))
    fail(ErrorCode::Geometry,
         "digitize: profile '" + profile.name + "' exceeds tube length");

  LoopStack stack;
  const double r0 = tube.innermost_radius(wire);
  double section_start = 0.0;
  for (const auto& section : profile.sections) {
    if (!(section.axial_extent >= 0.0))
      fail(ErrorCode::Geometry, "digitize: negative section extent");
    if (section.layer_count < 0)
      fail(ErrorCode::Geometry, "digitize: negative layer count");
    if (section.layer_count > 0) {
      const long n = turn_count(section.axial_extent, wire.pitch);
      for (long i = 0; i < n; ++i) {
        const double x = section_start + (static_cast<double>(i) + 0.5) * wire.pitch;
        for (int k = 0; k < section.layer_count; ++k)
          stack.loops.push_back({x, r0 + static_cast<double>(k) * wire.bare_diameter});
      }
    }
    section_start += section.axial_extent;
  }
  std::sort(stack.loops.begin(), stack.loops.end(), [](const Loop& a, const Loop& b) {
    return a.x != b.x ? a.x < b.x : a.r < b.r;
  });
  return stack;
}

struct CoilElectrical {
  double inductance = 0.0;  // [H]
  double resistance = 0.0;  // [ohm]

  void validate() const {
    if (!(inductance > 0.0)) fail(ErrorCode::Config, "coil: inductance must be > 0");
    if (!(resistance > 0.0)) fail(ErrorCode::Config, "coil: resistance must be > 0");
  }
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "single", "double", "dual-9-5-1-5-9", "exponential", "t-shape",
      "linear-accelerator"};
  return names;
}

/// Returns one of the six stock winding profiles. Section lengths that the
/// stock coils do not pin down are chosen here and stated in `notes`.
inline WindingProfile preset(std::string_view name,
                             double tube_length = TubeSpec{}.length) {
  const double L = tube_length;
  if (name == "single")
    return {"single", {{L, 1}}, "uniform single layer over the full tube"};
  if (name == "double")
    return {"double", {{L, 2}}, "uniform double layer over the full tube"};
  if (name == "dual-9-5-1-5-9") {
    WindingProfile p;
    p.name = "dual-9-5-1-5-9";
    const int layers[13] = {9, 5, 1, 1, 5, 9, 0, 9, 5, 1, 1, 5, 9};
    for (int l : layers) p.sections.push_back({L / 13.0, l});
    p.notes =
        "two mirrored 9-5-1-5-9 winding groups of six equal sections with a "
        "central gap; all thirteen slots assumed equal";
    return p;
  }
  if (name == "exponential") {
    WindingProfile p;
    p.name = "exponential";
    const int layers[6] = {8, 6, 4, 3, 2, 1};
    for (int l : layers) p.sections.push_back({L / 6.0, l});
    p.notes =
        "stepped approximation of an exponentially tapering winding; six "
        "equal sections with layer counts 8-6-4-3-2-1 assumed";
    return p;
  }
  if (name == "t-shape") {
    WindingProfile p;
    p.name = "t-shape";
    p.sections = {{0.2 * L, 30}, {0.7 * L, 4}, {0.1 * L, 1}};
    p.notes =
        "30-layer head over 20% of the tube, 4-layer body over 70%, "
        "single-layer tail over 10%; the split is assumed";
    return p;
  }
  if (name == "linear-accelerator") {
    WindingProfile p;
    p.name = "linear-accelerator";
    const int layers[9] = {2, 0, 2, 0, 2, 0, 2, 0, 2};
    for (int l : layers) p.sections.push_back({L / 9.0, l});
    p.notes =
        "five equal double-layer sections separated by four equal gaps, all "
        "nine slots assumed equal";
    return p;
  }
  fail(ErrorCode::Lookup, "unknown preset '" + std::string(name) + "'");
}

/// Bench-measured lumped values for the six stock profiles, plus a note for
/// profiles whose geometry assumptions are known to pull the estimator away
/// from the bench value. An estimate outside tolerance without a note is a
/// defect; see estimate_electrical tests.
struct PresetReference {
  double inductance;  // [H]
  double resistance;  // [ohm]
  const char* deviation_note;
};

inline const PresetReference* preset_reference(std::string_view name) {
  static constexpr const char* kCoverageNote =
      "stock profile assumes the winding covers its full nominal extent; the "
      "bench coil was wound from a fixed 10 m wire stock that covers only "
      "part of the tube, so the estimate runs high";
  struct Entry {
    const char* name;
    PresetReference ref;
  };
  static const Entry table[] = {
      {"single", {34.2e-6, 0.5, kCoverageNote}},
      {"double", {61.9e-6, 0.6, kCoverageNote}},
      {"dual-9-5-1-5-9", {94.9e-6, 0.6, kCoverageNote}},
      {"exponential", {127.6e-6, 0.7, kCoverageNote}},
      {"t-shape", {147.4e-6, 0.6, kCoverageNote}},
      {"linear-accelerator", {49.5e-6, 0.7, kCoverageNote}},
  };
  for (const auto& e : table)
    if (name == e.name) return &e.ref;
  return nullptr;
}

}  // namespace coilsim
