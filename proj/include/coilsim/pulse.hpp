#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "coilsim/error.hpp"

namespace coilsim {

/// H-bridge drive state. Forward closes one diagonal SSR pair, Reverse the
/// other, Buffer opens all four (coil current free-wheels through the
/// flyback path). Exactly one state holds at any instant, so shoot-through
/// is unrepresentable.
enum class BridgeState : int {
  Reverse = -1,
  Buffer = 0,
  Forward = +1,
};

struct PulseSegment {
  BridgeState state = BridgeState::Buffer;
  int duration_ms = 0;  // positive integer milliseconds
};

struct PulseSchedule {
  static constexpr int kDefaultMaxTotalMs = 200;

  std::vector<PulseSegment> segments;

  int total_ms() const {
    int sum = 0;
    for (const auto& s : segments) sum += s.duration_ms;
    return sum;
  }
  double total_seconds() const { return static_cast<double>(total_ms()) / 1000.0; }
};

inline char segment_letter(BridgeState s) {
  switch (s) {
    case BridgeState::Forward: return 'F';
    case BridgeState::Buffer: return 'B';
    case BridgeState::Reverse: return 'R';
  }
  return '?';
}

/// Parses the "F5 B5 R4" pulse notation: whitespace-separated tokens, each a
/// state letter (F/B/R, case-insensitive) followed by a positive integer
/// millisecond duration. Errors carry the 1-based token index.
inline PulseSchedule parse_schedule(std::string_view text,
                                    int max_total_ms = PulseSchedule::kDefaultMaxTotalMs) {
  PulseSchedule schedule;
  std::size_t pos = 0;
  int token_index = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    ++token_index;

    const std::string where = "token " + std::to_string(token_index) + " ('" +
                              std::string(token) + "')";
    const char letter =
        static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    BridgeState state;
    if (letter == 'F') state = BridgeState::Forward;
    else if (letter == 'B') state = BridgeState::Buffer;
    else if (letter == 'R') state = BridgeState::Reverse;
    else fail(ErrorCode::Parse, "pulse: " + where + ": unknown state letter");

    const std::string_view digits = token.substr(1);
    if (digits.empty())
      fail(ErrorCode::Parse, "pulse: " + where + ": missing duration");
    for (char c : digits)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail(ErrorCode::Parse, "pulse: " + where + ": malformed duration");
    if (digits.size() > 6)
      fail(ErrorCode::Parse, "pulse: " + where + ": duration out of range");
    const long value = std::strtol(std::string(digits).c_str(), nullptr, 10);
    if (value <= 0)
      fail(ErrorCode::Parse, "pulse: " + where + ": duration must be a positive integer");
    schedule.segments.push_back({state, static_cast<int>(value)});
  }
  if (schedule.segments.empty())
    fail(ErrorCode::Parse, "pulse: empty schedule");
  if (schedule.total_ms() > max_total_ms)
    fail(ErrorCode::Parse, "pulse: total " + std::to_string(schedule.total_ms()) +
                               " ms exceeds maximum " + std::to_string(max_total_ms) + " ms");
  return schedule;
}

/// Canonical text form: uppercase letters, single spaces.
inline std::string format_schedule(const PulseSchedule& schedule) {
  std::string out;
  for (const auto& seg : schedule.segments) {
    if (!out.empty()) out += ' ';
    out += segment_letter(seg.state);
    out += std::to_string(seg.duration_ms);
  }
  return out;
}

/// Bridge polarity at time t (seconds). Segments are left-closed,
/// right-open; any time at or past the schedule end reads Buffer (all off,
/// launch complete).
inline BridgeState polarity_at(const PulseSchedule& schedule, double t_seconds) {
  if (t_seconds < 0.0) fail(ErrorCode::Domain, "polarity_at: negative time");
  int cum_ms = 0;
  for (const auto& seg : schedule.segments) {
    cum_ms += seg.duration_ms;
    if (t_seconds < static_cast<double>(cum_ms) / 1000.0) return seg.state;
  }
  return BridgeState::Buffer;
}

/// |L * dI/dt|: the voltage spike the flyback path has to absorb when the
/// bridge interrupts dI of coil current within dt.
inline double back_emf_estimate(double inductance, double delta_current, double delta_time) {
  if (!(delta_time > 0.0)) fail(ErrorCode::Domain, "back_emf_estimate: dt must be > 0");
  return std::abs(inductance * delta_current / delta_time);
}

}  // namespace coilsim
