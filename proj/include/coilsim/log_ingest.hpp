#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "coilsim/error.hpp"

namespace coilsim {

/// A measured current log as written by the SD logger: sensor volts at a
/// strict 1 ms cadence. The Hall sensor reads 0.03 V per ampere.
struct MeasuredLog {
  static constexpr double kVoltsPerAmp = 0.03;

  struct Row {
    int t_ms = 0;
    double sensor_v = 0.0;
  };
  std::vector<Row> rows;

  double current(std::size_t index) const { return rows[index].sensor_v / kVoltsPerAmp; }
};

struct PulseBounds {
  int t_begin_ms = 0;
  int t_end_ms = 0;  // exclusive
  char kind = 'D';   // 'F' forward (I > 0), 'R' reverse (I < 0), 'D' dead
};

struct LogReport {
  double charge = 0.0;            // integral of I dt [C]
  double resistive_energy = 0.0;  // integral of I^2 R dt [J]
  double peak_current = 0.0;      // max |I| [A]
  std::vector<PulseBounds> segments;
};

/// Reads a "t_ms,sensor_V" CSV. Rows must tick strictly at 1 ms (no jitter,
/// no gaps); violations report the offending file line.
inline MeasuredLog ingest_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Ingest, "log: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_ms,sensor_V")
    fail(ErrorCode::Ingest, "log: expected header 't_ms,sensor_V', got '" + line + "'");

  MeasuredLog log;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::Ingest, "log line " + std::to_string(line_no) + ": expected 't_ms,sensor_V'");
    int t_ms = 0;
    double sensor_v = 0.0;
    try {
      std::size_t used = 0;
      t_ms = std::stoi(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing characters");
      const std::string vs = line.substr(comma + 1);
      sensor_v = std::stod(vs, &used);
      if (used != vs.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ErrorCode::Ingest, "log line " + std::to_string(line_no) + ": malformed row '" + line + "'");
    }
    if (!log.rows.empty() && t_ms != log.rows.back().t_ms + 1)
      fail(ErrorCode::Ingest,
           "log line " + std::to_string(line_no) + ": time " + std::to_string(t_ms) +
               " ms breaks the 1 ms cadence (previous " +
               std::to_string(log.rows.back().t_ms) + " ms)");
    log.rows.push_back({t_ms, sensor_v});
  }
  if (log.rows.empty()) fail(ErrorCode::Ingest, "log: no data rows");
  return log;
}

inline MeasuredLog ingest_log_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Ingest, "cannot open log file " + path.string());
  return ingest_log(in);
}

/// Derived quantities: trapezoidal charge and resistive energy, plus pulse
/// boundaries from sign changes and dead zones (|I| below dead_band).
inline LogReport analyze_log(const MeasuredLog& log, double coil_resistance,
                             double dead_band = 1.0) {
  if (!(coil_resistance > 0.0)) fail(ErrorCode::Ingest, "analyze_log: resistance must be > 0");
  LogReport report;
  const double dt = 1e-3;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const double amps = log.current(i);
    report.peak_current = std::max(report.peak_current, std::abs(amps));
    if (i + 1 < log.rows.size()) {
      const double next = log.current(i + 1);
      report.charge += 0.5 * (amps + next) * dt;
      report.resistive_energy += 0.5 * (amps * amps + next * next) * coil_resistance * dt;
    }
  }
  auto classify = [&](double amps) {
    if (std::abs(amps) < dead_band) return 'D';
    return amps > 0.0 ? 'F' : 'R';
  };
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const char kind = classify(log.current(i));
    if (report.segments.empty() || report.segments.back().kind != kind) {
      report.segments.push_back({log.rows[i].t_ms, log.rows[i].t_ms + 1, kind});
    } else {
      report.segments.back().t_end_ms = log.rows[i].t_ms + 1;
    }
  }
  return report;
}

}  // namespace coilsim
