#pragma once

#include <stdexcept>
#include <string>

namespace coilsim {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCode {
  Usage = 2,
  Parse = 3,
  Config = 4,
  Geometry = 5,
  Domain = 6,
  Lookup = 7,
  Budget = 8,
  Ingest = 9,
  Audit = 10,
};

inline const char* error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Config: return "config";
    case ErrorCode::Geometry: return "geometry";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Lookup: return "lookup";
    case ErrorCode::Budget: return "budget";
    case ErrorCode::Ingest: return "ingest";
    case ErrorCode::Audit: return "audit";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* category() const { return error_category(code_); }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace coilsim
